"""Exhaustive reference search over every choice of k removed tour edges."""

import itertools
import logging
import math

from .._config import Settings, resolve
from .._errors import BudgetExceededError
from ..instance import Move, TourInstance, pair
from ..patterns import ConnectionPattern, component_sizes, is_feasible
from ._common import finish

logger = logging.getLogger(__name__)


def brute_force_best_move(
    inst: TourInstance,
    k: int,
    *,
    components: int | None = None,
    settings: Settings | None = None,
) -> Move | None:
    """Best improving k-move, found by trying every k-subset of tour edges.

    Added edges are chords. With `components` set, only moves whose pattern
    has that many sequential components are considered.

    Raises
    ------
    BudgetExceededError
        If C(n, k) exceeds `settings.oracle_budget`.
    """
    settings = resolve(settings)
    subsets = math.comb(inst.n, k)
    if subsets > settings.oracle_budget:
        raise BudgetExceededError(
            f"The oracle would visit C({inst.n}, {k}) = {subsets} edge subsets, above "
            f"oracle_budget={settings.oracle_budget}. Raise the budget or use a "
            f"faster solver."
        )
    size = 2 * k
    best_key: tuple | None = None
    best_found: tuple[ConnectionPattern, tuple[int, ...]] | None = None

    for edges in itertools.combinations(range(inst.n), k):
        vert = [inst.tour[(edges[v // 2] + v % 2) % inst.n] for v in range(size)]
        removed_weight = sum(inst.edge_weight(e) for e in edges)
        mate = [-1] * size
        used: set[tuple[int, int]] = set()

        def rec(v: int, added_weight: int):
            nonlocal best_key, best_found
            while v < size and mate[v] != -1:
                v += 1
            if v == size:
                gain = removed_weight - added_weight
                if gain <= 0 or (best_key is not None and -gain > best_key[0]):
                    return
                key = (-gain, edges, tuple(sorted(used)))
                if best_key is not None and key >= best_key:
                    return
                pattern = ConnectionPattern._unchecked(tuple(mate))
                if not is_feasible(pattern):
                    return
                if components is not None and len(component_sizes(pattern)) != components:
                    return
                best_key = key
                best_found = (pattern, edges)
                return
            for w in range(v + 1, size):
                if mate[w] != -1 or (v % 2 == 0 and w == v + 1):
                    continue
                a, b = vert[v], vert[w]
                if a == b or not inst.is_chord(a, b):
                    continue
                e = pair(a, b)
                if e in used:
                    continue
                mate[v], mate[w] = w, v
                used.add(e)
                rec(v + 1, added_weight + inst.weight(a, b))
                used.discard(e)
                mate[v] = mate[w] = -1

        rec(0, 0)

    if best_found is None:
        return None
    pattern, edges = best_found
    move = finish(inst, pattern, dict(enumerate(edges)))
    logger.debug("oracle k=%d found gain %d", k, move.gain)
    return move
