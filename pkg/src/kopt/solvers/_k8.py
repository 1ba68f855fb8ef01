"""Best improving 8-move for integer weights in [1, W].

Patterns made of a 2-swap and two 3-swaps are the only ones the k <= 7
machinery does not cover. For those, one 3-swap is enumerated and the other
two parts are found by range queries: either with the order constraints
around the 2-swap relaxed to inequalities, or by guessing the gains of both
parts and asking for any pair of placements with those gains.
"""

from collections import defaultdict
import logging
from typing import Sequence

from .._config import Settings, resolve
from .._errors import WeightBoundError
from ..instance import Move, TourInstance
from ..patterns import ConnectionPattern, improving_candidates, interactions, relaxable
from ..rangesearch import (
    Interval,
    PairStructure,
    PrioritizedPoint,
    RangeTree,
    pair_query_disjoint,
    pair_query_nested,
    query_max_excluding,
)
from ..seqswaps import SequentialIndex
from ._common import Placement, best_improving, component_slots, placements, run_patterns
from ._meet import best_for_pattern
from ._quasi import gaps, point_tree, quasi_for_pattern, settle

logger = logging.getLogger(__name__)

K = 8


def check_weights(inst: TourInstance, W: int) -> None:
    if W < 1:
        raise ValueError(f"The weight bound W must be at least 1, got {W}.")
    outside = [(u, v, w) for u, v, w in inst.edges if not 1 <= w <= W]
    if outside:
        u, v, w = outside[0]
        raise WeightBoundError(
            f"detect_k8_bounded needs every weight in [1, {W}], but {len(outside)} edges "
            f"fall outside (e.g. {u}-{v} has weight {w}). Pass a larger W, or use "
            f"best_move_c_sequential(inst, 8, 3) together with the k <= 7 engines, "
            f"which take O(n^2 polylog n) without a weight bound."
        )


def labelled(p: ConnectionPattern) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]] | None:
    """(X, Y, Z) for a pattern of one 2-swap X and two 3-swaps, with Y the
    3-swap interacting less with X; None for any other shape."""
    comps = component_slots(p)
    if sorted(len(c) for c in comps) != [2, 3, 3]:
        return None
    (x,) = [c for c in comps if len(c) == 2]
    y, z = [c for c in comps if len(c) == 3]
    if interactions(p, x, y) > interactions(p, x, z):
        y, z = z, y
    return x, y, z


def double_neighbour(
    p: ConnectionPattern, x: tuple[int, ...], y: tuple[int, ...], z: tuple[int, ...]
) -> bool:
    """True when one slot of X has both neighbours in Y and the other both in Z."""
    i, j = x
    return any(
        {a - 1, a + 1} <= set(y) and {b - 1, b + 1} <= set(z) for a, b in ((i, j), (j, i))
    )


def relaxed_side(
    p: ConnectionPattern, x: tuple[int, ...], y: tuple[int, ...], z: tuple[int, ...]
) -> tuple[int, tuple[int, ...], tuple[int, ...]] | None:
    """(a, A, E) where slot a of X sits between two slots of A and both order
    constraints around it may be relaxed; E is the remaining 3-swap."""
    for a, b in ((x[0], x[1]), (x[1], x[0])):
        if not ({a - 1, a + 1} <= set(y) and {b - 1, b + 1} <= set(z)):
            continue
        for slot, side, other in ((a, y, z), (b, z, y)):
            if (
                slot - 2 not in side
                and slot + 2 not in side
                and relaxable(p, slot)
                and relaxable(p, slot - 1)
            ):
                return slot, side, other
    return None


def _clip(interval: Interval, lo: int | None = None, hi: int | None = None) -> Interval:
    a, b = interval
    return (a if lo is None else max(a, lo), b if hi is None else min(b, hi))


def _best_avoiding(
    tree: RangeTree, box: Sequence[Interval], dm: int, dp: int, value: int
) -> PrioritizedPoint | None:
    """Best point whose increasing coordinates `dm` < `dp` both differ from `value`."""
    boxes = []
    for lo_m, hi_m, lo_p, hi_p in (
        (None, None, None, value - 1),
        (None, value - 1, value + 1, None),
        (value + 1, None, None, None),
    ):
        b = list(box)
        b[dm] = _clip(b[dm], lo_m, hi_m)
        b[dp] = _clip(b[dp], lo_p, hi_p)
        if all(lo <= hi for lo, hi in b):
            boxes.append(b)
    found = [hit for b in boxes if (hit := tree.best(b)) is not None]
    return max(found, key=lambda q: (q.priority, -q.payload), default=None)


def _case_one(
    inst: TourInstance,
    p: ConnectionPattern,
    x: tuple[int, ...],
    a: int,
    side: tuple[int, ...],
    other: tuple[int, ...],
    index: SequentialIndex,
) -> Move | None:
    table_x, table_a = placements(index, p, x), placements(index, p, side)
    if not table_x or not table_a:
        return None
    da = x.index(a)
    dm, dp = side.index(a - 1), side.index(a + 1)
    tree_x = point_tree(table_x, 2, da)
    tree_a = point_tree(table_a, 3)

    best_total, best_assignment = 0, None
    for e_edges, e_gain in placements(index, p, other):
        gap = gaps(other, e_edges, inst.n)
        box_x = [gap(s) for s in x]
        box_a = [gap(s) for s in side]
        px, pa = tree_x.best(box_x), tree_a.best(box_a)
        if px is None or pa is None:
            continue
        taken = {pa.coords[dm], pa.coords[dp]}
        x0 = px.coords[da]
        if x0 not in taken:
            pair = (px, pa)
        else:
            options = []
            if (alt := query_max_excluding(tree_x, box_x, da, taken)) is not None:
                options.append((alt, pa))
            if (alt := _best_avoiding(tree_a, box_a, dm, dp, x0)) is not None:
                options.append((px, alt))
            for value in taken - {x0}:
                pinned = list(box_x)
                pinned[da] = _clip(pinned[da], value, value)
                if pinned[da][0] > pinned[da][1]:
                    continue
                qx = tree_x.best(pinned)
                qa = _best_avoiding(tree_a, box_a, dm, dp, value)
                if qx is not None and qa is not None:
                    options.append((qx, qa))
            if not options:
                continue
            pair = max(options, key=lambda o: o[0].priority + o[1].priority)
        total = e_gain + pair[0].priority + pair[1].priority
        if total > best_total:
            best_total = total
            best_assignment = (
                dict(zip(other, e_edges)) | dict(zip(x, pair[0].coords)) | dict(zip(side, pair[1].coords))
            )
    if best_assignment is None:
        return None
    return settle(inst, p, best_assignment, index)


def _signed(interval: Interval, sign: int) -> Interval:
    lo, hi = interval
    return interval if sign > 0 else (-hi, -lo)


def _by_gain(table: list[Placement]) -> dict[int, list[tuple[int, ...]]]:
    grouped: dict[int, list[tuple[int, ...]]] = defaultdict(list)
    for edges, gain in table:
        grouped[gain].append(edges)
    return grouped


def _case_two(
    inst: TourInstance,
    p: ConnectionPattern,
    x: tuple[int, ...],
    y: tuple[int, ...],
    z: tuple[int, ...],
    W: int,
    index: SequentialIndex,
) -> Move | None:
    links = [(s, t) for s in x for t in (s - 1, s + 1) if t in y]
    if len({s for s, _ in links}) < len(links) or len({t for _, t in links}) < len(links):
        logger.info("%s shares a slot between both links; searching it exactly", p)
        return best_for_pattern(inst, p, index)

    table_x, table_y = placements(index, p, x), placements(index, p, y)
    if not table_x or not table_y:
        return None

    if not links:
        tree_x, tree_y = point_tree(table_x, 2), point_tree(table_y, 3)
        best_total, best_assignment = 0, None
        for z_edges, z_gain in placements(index, p, z):
            gap = gaps(z, z_edges, inst.n)
            px = tree_x.best([gap(s) for s in x])
            py = tree_y.best([gap(s) for s in y])
            if px is None or py is None:
                continue
            if (total := z_gain + px.priority + py.priority) > best_total:
                best_total = total
                best_assignment = dict(zip(z, z_edges)) | dict(zip(x, px.coords)) | dict(zip(y, py.coords))
        return None if best_assignment is None else settle(inst, p, best_assignment, index)

    # point layout: linked coordinates first, signed so that "p before q" reads p < q
    signs = [1 if t < s else -1 for s, t in links]
    x_order = [s for s, _ in links] + [s for s in x if s not in {s for s, _ in links}]
    y_order = [t for _, t in links] + [t for t in y if t not in {t for _, t in links}]
    x_sign = signs + [1] * (2 - len(links))
    y_sign = signs + [1] * (3 - len(links))

    def layout(
        edges: tuple[int, ...], slots: tuple[int, ...], order: list[int], sign: list[int]
    ) -> tuple[int, ...]:
        where = dict(zip(slots, edges))
        return tuple(sg * where[s] for s, sg in zip(order, sign))

    xs, ys = _by_gain(table_x), _by_gain(table_y)
    grid = sorted(
        ((gx, gy) for gx in range(-2 * W, 2 * W + 1) for gy in range(-3 * W, 3 * W + 1)
         if gx in xs and gy in ys),
        key=lambda g: -(g[0] + g[1]),
    )
    structures: dict[tuple[int, int], PairStructure] = {}

    def structure(gx: int, gy: int) -> PairStructure:
        if (ps := structures.get((gx, gy))) is None:
            ps = structures[(gx, gy)] = PairStructure(
                [layout(e, y, y_order, y_sign) for e in ys[gy]],
                [layout(e, x, x_order, x_sign) for e in xs[gx]],
            )
        return ps

    best_total, best_assignment = 0, None
    for z_edges, z_gain in placements(index, p, z):
        gap = gaps(z, z_edges, inst.n)
        ry = [_signed(gap(s), sg) for s, sg in zip(y_order, y_sign)]
        rx = [_signed(gap(s), sg) for s, sg in zip(x_order, x_sign)]
        for gx, gy in grid:
            if z_gain + gx + gy <= best_total:
                break
            ps = structure(gx, gy)
            if len(links) == 1:
                hit = pair_query_disjoint(ps, rx[0], ry[1], rx[1], ry[2])
            else:
                hit = pair_query_nested(ps, rx[0], rx[1], ry[2])
            if hit is None:
                continue
            i, j = hit
            best_total = z_gain + gx + gy
            best_assignment = (
                dict(zip(z, z_edges)) | dict(zip(y, ys[gy][i])) | dict(zip(x, xs[gx][j]))
            )
            break
    return None if best_assignment is None else settle(inst, p, best_assignment, index)


def k8_for_pattern(
    inst: TourInstance, p: ConnectionPattern, W: int, index: SequentialIndex
) -> Move | None:
    if (parts := labelled(p)) is None:
        return quasi_for_pattern(inst, p, index)
    x, y, z = parts
    if double_neighbour(p, x, y, z):
        if (choice := relaxed_side(p, x, y, z)) is None:
            logger.warning("%s has no side safe to relax; searching it exactly", p)
            return best_for_pattern(inst, p, index)
        a, side, other = choice
        return _case_one(inst, p, x, a, side, other, index)
    return _case_two(inst, p, x, y, z, W, index)


def detect_k8_bounded(
    inst: TourInstance,
    W: int,
    *,
    settings: Settings | None = None,
    index: SequentialIndex | None = None,
) -> Move | None:
    """Best improving 8-move when every weight lies in [1, W].

    Exact under the assumption that no improving move with fewer removed
    edges exists; see `detect_quasilinear`.

    Raises
    ------
    WeightBoundError
        If some edge weight falls outside [1, W].
    PreconditionViolationError
        When a smaller improving move turns up; it is attached.
    """
    check_weights(inst, W)
    settings = resolve(settings)
    index = (index or SequentialIndex(inst)).prepare(range(2, K + 1))
    patterns = improving_candidates(K)
    moves = run_patterns(lambda p: k8_for_pattern(inst, p, W, index), patterns, settings.threads)
    found = best_improving(moves)
    logger.debug("k8 W=%d over %d patterns: %s", W, len(patterns), found and found.gain)
    return found
