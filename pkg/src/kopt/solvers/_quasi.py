"""Quasi-linear search for the best improving k-move when k <= 7.

The answer is exact only when no improving move with fewer removed edges
exists. Reducible patterns are never searched, and a relaxed answer that
lands in a reducible pattern exposes a smaller improving move, which is
raised as `PreconditionViolationError`.
"""

import bisect
import itertools
import logging
from typing import Callable, Mapping, Sequence

from .._config import Settings, resolve
from .._errors import PreconditionViolationError
from ..instance import Move, Swap, TourInstance, validate_swap
from ..patterns import (
    ConnectionPattern,
    improving_candidates,
    realized_pairs,
    reducible_split,
    swap_adjacent,
)
from ..rangesearch import Interval, PrioritizedPoint, RangeTree, query_max_excluding
from ..seqswaps import SequentialIndex
from ._common import Placement, best_improving, component_slots, finish, placements, run_patterns
from ._meet import best_for_pattern

logger = logging.getLogger(__name__)

QUASI_MAX_K = 7

Gap = Callable[[int], Interval]


def gaps(slots: Sequence[int], edges: Sequence[int], n: int) -> Gap:
    """Closed range left to a free slot between the placed slots around it.

    Slots before the first placed slot are bounded below by -1 and slots after
    the last one above by n, both exclusive.
    """

    def gap(s: int) -> Interval:
        pos = bisect.bisect_left(slots, s)
        lo = edges[pos - 1] if pos else -1
        hi = edges[pos] if pos < len(slots) else n
        return lo + 1, hi - 1

    return gap


def point_tree(table: list[Placement], dims: int, distinct_dim: int | None = None) -> RangeTree:
    return RangeTree(
        (PrioritizedPoint(edges, gain, idx) for idx, (edges, gain) in enumerate(table)),
        dims,
        distinct_dim,
    )


def best_pair_excluding(
    ta: RangeTree, box_a: Sequence[Interval], da: int,
    tb: RangeTree, box_b: Sequence[Interval], db: int,
) -> tuple[PrioritizedPoint, PrioritizedPoint] | None:
    """Best a in box_a and b in box_b, maximizing the priority sum, with
    a.coords[da] != b.coords[db]."""
    pa, pb = ta.best(box_a), tb.best(box_b)
    if pa is None or pb is None:
        return None
    if pa.coords[da] != pb.coords[db]:
        return pa, pb
    options = []
    if (alt := query_max_excluding(tb, box_b, db, {pa.coords[da]})) is not None:
        options.append((pa, alt))
    if (alt := query_max_excluding(ta, box_a, da, {pb.coords[db]})) is not None:
        options.append((alt, pb))
    return max(options, key=lambda o: o[0].priority + o[1].priority, default=None)


def _as_move(
    inst: TourInstance, q: ConnectionPattern, slots: Sequence[int], edges: Sequence[int]
) -> Move | None:
    added = realized_pairs(q.mate, slots, edges, inst)
    if added is None:
        return None
    result = validate_swap(inst, Swap.build(inst, edges, added))
    return result if isinstance(result, Move) else None


def settle(
    inst: TourInstance,
    p: ConnectionPattern,
    assignment: Mapping[int, int],
    index: SequentialIndex,
) -> Move | None:
    """Turn a relaxed optimum of `p` into a move of the same gain.

    A placement that breaks the slot order at one adjacent pair fits the
    pattern with those two slots exchanged. That pattern is either feasible,
    and the placement is a move, or reducible, and one of its parts is a smaller
    improving move.
    """
    edges = [assignment[s] for s in range(p.k)]
    if all(a < b for a, b in itertools.pairwise(edges)):
        return finish(inst, p, assignment)
    flips = [i for i in range(p.k - 1) if edges[i] > edges[i + 1]]
    if len(flips) == 1:
        i = flips[0]
        swapped = edges[:i] + [edges[i + 1], edges[i]] + edges[i + 2 :]
        if all(a < b for a, b in itertools.pairwise(swapped)):
            q = swap_adjacent(p, i)
            if (move := _as_move(inst, q, range(p.k), swapped)) is not None:
                logger.debug("relaxed optimum of %s settled in %s", p, q)
                return move
            if (split := reducible_split(q)) is not None:
                for group in split:
                    part = _as_move(inst, q, group, [swapped[s] for s in group])
                    if part is not None and part.gain > 0:
                        raise PreconditionViolationError(
                            f"Found an improving {part.k}-move with gain {part.gain} while "
                            f"searching for {p.k}-moves. The quasi-linear engines are only "
                            f"exact without smaller improving moves; apply this one first "
                            f"(local_search does so automatically).",
                            part,
                        )
    logger.warning("relaxed optimum of %s did not settle; searching the pattern exactly", p)
    return best_for_pattern(inst, p, index)


def _two_two(
    inst: TourInstance,
    p: ConnectionPattern,
    x: tuple[int, ...],
    y: tuple[int, ...],
    z: tuple[int, ...],
    index: SequentialIndex,
) -> Move | None:
    """Two 2-swaps x and y around an enumerated swap z."""
    links = [
        i for i in range(p.k - 1)
        if (i in x and i + 1 in y) or (i in y and i + 1 in x)
    ]
    if len(links) > 1:
        logger.warning("%s has 2-swaps interacting %d times; searching it exactly", p, len(links))
        return best_for_pattern(inst, p, index)
    if links:
        i = links[0]
        lower, upper = (x, y) if i in x else (y, x)
        dl, du = lower.index(i), upper.index(i + 1)
    else:
        lower, upper = x, y
        dl = du = None

    table_l, table_u = placements(index, p, lower), placements(index, p, upper)
    if not table_l or not table_u:
        return None
    tree_l, tree_u = point_tree(table_l, 2, dl), point_tree(table_u, 2, du)

    best_total, best_assignment = 0, None
    for z_edges, z_gain in placements(index, p, z):
        gap = gaps(z, z_edges, inst.n)
        box_l = [gap(s) for s in lower]
        box_u = [gap(s) for s in upper]
        if dl is None or du is None:
            pl, pu = tree_l.best(box_l), tree_u.best(box_u)
            if pl is None or pu is None:
                continue
        elif (found := best_pair_excluding(tree_l, box_l, dl, tree_u, box_u, du)) is None:
            continue
        else:
            pl, pu = found
        total = z_gain + pl.priority + pu.priority
        if total > best_total:
            best_total = total
            best_assignment = (
                dict(zip(z, z_edges)) | dict(zip(lower, pl.coords)) | dict(zip(upper, pu.coords))
            )
    if best_assignment is None:
        return None
    return settle(inst, p, best_assignment, index)


def quasi_for_pattern(
    inst: TourInstance, p: ConnectionPattern, index: SequentialIndex
) -> Move | None:
    comps = component_slots(p)
    if len(comps) <= 2:
        return best_for_pattern(inst, p, index)
    if len(comps) == 3:
        twos = [c for c in comps if len(c) == 2]
        if len(twos) == 3:
            return _two_two(inst, p, comps[0], comps[1], comps[2], index)
        if len(twos) == 2:
            (z,) = [c for c in comps if len(c) != 2]
            return _two_two(inst, p, twos[0], twos[1], z, index)
    logger.debug("%s has no quasi-linear rule; searching it exactly", p)
    return best_for_pattern(inst, p, index)


def detect_quasilinear(
    inst: TourInstance,
    k: int,
    *,
    settings: Settings | None = None,
    index: SequentialIndex | None = None,
) -> Move | None:
    """Best improving k-move, assuming no smaller improving move exists.

    Parameters
    ----------
    inst: TourInstance
        A bounded-degree instance.
    k: int
        Between 2 and 7.

    Raises
    ------
    PreconditionViolationError
        When the search runs into an improving move with fewer removed edges;
        the move is attached.
    """
    if not 2 <= k <= QUASI_MAX_K:
        raise ValueError(
            f"detect_quasilinear handles 2 <= k <= {QUASI_MAX_K}, got k={k}. Use "
            f"detect_k8_bounded for k=8 or best_move_pathwidth_dp for larger k."
        )
    settings = resolve(settings)
    index = (index or SequentialIndex(inst)).prepare(range(2, k + 1))
    patterns = improving_candidates(k)
    moves = run_patterns(lambda p: quasi_for_pattern(inst, p, index), patterns, settings.threads)
    found = best_improving(moves)
    logger.debug("quasi k=%d over %d patterns: %s", k, len(patterns), found and found.gain)
    return found
