"""Meet-in-the-middle over the sequential components of a pattern.

A pattern with c components is split into a left group of ceil(c/2)
components and a right group with the rest. Every placement of the left group
becomes a point whose coordinates are its tour edges at the slots bordering the
right group; every placement of the right group then asks a range tree for the
best compatible left placement.
"""

import itertools
import logging
from typing import Iterator, Sequence

from .._config import Settings, resolve
from ..instance import Move, TourInstance, best
from ..patterns import ConnectionPattern, feasible_patterns
from ..rangesearch import PrioritizedPoint, RangeTree
from ..seqswaps import SequentialIndex
from ._common import Placement, best_improving, component_slots, finish, placements, run_patterns

logger = logging.getLogger(__name__)


def combine(
    groups: Sequence[tuple[tuple[int, ...], list[Placement]]],
) -> Iterator[tuple[dict[int, int], int]]:
    """Placements of several components at once, increasing on their union."""
    slots = sorted(s for group_slots, _ in groups for s in group_slots)
    for choice in itertools.product(*(table for _, table in groups)):
        assignment: dict[int, int] = {}
        gain = 0
        for (group_slots, _), (edges, g) in zip(groups, choice):
            assignment.update(zip(group_slots, edges))
            gain += g
        if all(assignment[a] < assignment[b] for a, b in itertools.pairwise(slots)):
            yield assignment, gain


def _boundaries(k: int, left: set[int]) -> tuple[list[int], list[int]]:
    """Left slots followed by a right slot, and left slots preceded by one."""
    before = [i for i in sorted(left) if i + 1 < k and i + 1 not in left]
    after = [i for i in sorted(left) if i > 0 and i - 1 not in left]
    return before, after


def best_for_pattern(
    inst: TourInstance, p: ConnectionPattern, index: SequentialIndex
) -> Move | None:
    comps = component_slots(p)
    tables = [(slots, placements(index, p, slots)) for slots in comps]
    if len(comps) == 1:
        top = max((gain for _, gain in tables[0][1]), default=0)
        if top <= 0:
            return None
        return best(
            finish(inst, p, dict(enumerate(edges))) for edges, gain in tables[0][1] if gain == top
        )

    h = (len(comps) + 1) // 2
    left_tables, right_tables = tables[:h], tables[h:]
    left = {s for slots, _ in left_tables for s in slots}
    before, after = _boundaries(p.k, left)
    dims = len(before) + len(after)

    points = [
        PrioritizedPoint(
            tuple(assignment[i] for i in before) + tuple(assignment[i] for i in after),
            gain,
            tuple(sorted(assignment.items())),
        )
        for assignment, gain in combine(left_tables)
    ]
    if not points:
        return None
    tree = RangeTree(points, dims)
    lowest, highest = -1, inst.n
    best_gain = 0
    tied: list[dict[int, int]] = []
    for assignment, gain in combine(right_tables):
        box = [(lowest, assignment[i + 1] - 1) for i in before] + [
            (assignment[i - 1] + 1, highest) for i in after
        ]
        hit = tree.best(box)
        if hit is None:
            continue
        total = hit.priority + gain
        if total < best_gain or total <= 0:
            continue
        if total > best_gain:
            best_gain, tied = total, []
        tied.append(dict(hit.payload) | assignment)
    # equal gains fall back to the global order on edge lists
    return best(finish(inst, p, assignment) for assignment in tied)


def best_move_c_sequential(
    inst: TourInstance,
    k: int,
    c: int,
    *,
    settings: Settings | None = None,
    index: SequentialIndex | None = None,
) -> Move | None:
    """Best improving k-move among patterns with exactly `c` sequential components.

    Runs in O(n^ceil(c/2) polylog n) for bounded degree.
    """
    settings = resolve(settings)
    patterns = [p for p in feasible_patterns(k) if len(component_slots(p)) == c]
    index = (index or SequentialIndex(inst)).prepare(range(2, k + 1))
    moves = run_patterns(lambda p: best_for_pattern(inst, p, index), patterns, settings.threads)
    found = best_improving(moves)
    logger.debug("meet k=%d c=%d over %d patterns: %s", k, c, len(patterns), found and found.gain)
    return found


def best_move_meet(
    inst: TourInstance, k: int, *, settings: Settings | None = None
) -> Move | None:
    """Best improving k-move over every component count."""
    index = SequentialIndex(inst)
    return best_improving(
        best_move_c_sequential(inst, k, c, settings=settings, index=index)
        for c in range(1, k // 2 + 1)
    )
