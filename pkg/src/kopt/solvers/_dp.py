"""Dynamic programming over a minimum-width decomposition of the interaction graph.

Tables are keyed by the placements of the components in the current bag. A
table entry holds the best total gain of the components seen below the node
together with the placements realizing it.
"""

import logging
from typing import Literal

from .._config import Settings, resolve
from ..instance import Move, TourInstance
from ..patterns import ConnectionPattern, feasible_patterns, interaction_graph
from ..pathwidth import NiceNode, NodeKind, exact_pathwidth, exact_treewidth
from ..seqswaps import SequentialIndex
from ._common import Placement, best_improving, component_slots, finish, placements, run_patterns

logger = logging.getLogger(__name__)

Key = tuple[tuple[int, tuple[int, ...]], ...]
Entry = tuple[int, Key]


def _order_pairs(
    p: ConnectionPattern, comps: list[tuple[int, ...]]
) -> dict[tuple[int, int], list[tuple[int, int]]]:
    """For two interacting components, the slot pairs (i, i+1) crossing between them."""
    owner = {s: j for j, slots in enumerate(comps) for s in slots}
    crossing: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for i in range(p.k - 1):
        a, b = owner[i], owner[i + 1]
        if a != b:
            crossing.setdefault((a, b), []).append((i, i + 1))
            crossing.setdefault((b, a), []).append((i, i + 1))
    return crossing


class _PatternDP:
    __slots__ = ("p", "comps", "tables", "crossing", "gain_of")

    def __init__(self, p: ConnectionPattern, index: SequentialIndex):
        self.p = p
        self.comps = component_slots(p)
        self.tables: list[list[Placement]] = [placements(index, p, slots) for slots in self.comps]
        self.crossing = _order_pairs(p, self.comps)
        self.gain_of = [dict(table) for table in self.tables]

    def compatible(self, j: int, edges: tuple[int, ...], key: Key) -> bool:
        where = dict(zip(self.comps[j], edges))
        for other, other_edges in key:
            pairs = self.crossing.get((j, other))
            if not pairs:
                continue
            where_other = dict(zip(self.comps[other], other_edges))
            for a, b in pairs:
                fa = where[a] if a in where else where_other[a]
                fb = where[b] if b in where else where_other[b]
                if fa >= fb:
                    return False
        return True

    def run(self, nice: list[NiceNode]) -> tuple[int, Key] | None:
        results: list[dict[Key, Entry]] = []
        for node in nice:
            match node.kind:
                case NodeKind.LEAF:
                    table = {(): (0, ())}
                case NodeKind.INTRODUCE:
                    table = self._introduce(results[node.children[0]], node.vertex)
                case NodeKind.FORGET:
                    table = self._forget(results[node.children[0]], node.vertex)
                case NodeKind.JOIN:
                    table = self._join(results[node.children[0]], results[node.children[1]])
            results.append(table)
        root = results[-1]
        return root.get(())

    def _introduce(self, child: dict[Key, Entry], j: int) -> dict[Key, Entry]:
        out: dict[Key, Entry] = {}
        for key, (gain, witness) in child.items():
            for edges, g in self.tables[j]:
                if not self.compatible(j, edges, key):
                    continue
                new_key = tuple(sorted(key + ((j, edges),)))
                out[new_key] = (gain + g, tuple(sorted(witness + ((j, edges),))))
        return out

    def _forget(self, child: dict[Key, Entry], j: int) -> dict[Key, Entry]:
        out: dict[Key, Entry] = {}
        for key, entry in child.items():
            new_key = tuple(item for item in key if item[0] != j)
            if (current := out.get(new_key)) is None or entry[0] > current[0]:
                out[new_key] = entry
        return out

    def _join(self, left: dict[Key, Entry], right: dict[Key, Entry]) -> dict[Key, Entry]:
        out: dict[Key, Entry] = {}
        for key, (g1, w1) in left.items():
            if (other := right.get(key)) is None:
                continue
            g2, w2 = other
            shared = sum(self.gain_of[j][edges] for j, edges in key)
            out[key] = (g1 + g2 - shared, tuple(sorted(set(w1) | set(w2))))
        return out


def decompose(p: ConnectionPattern, decomposition: Literal["path", "tree"]) -> list[NiceNode]:
    simple, _ = interaction_graph(p)
    if decomposition == "tree":
        _, td = exact_treewidth(simple)
        return td.nice_form
    _, pd = exact_pathwidth(simple)
    return pd.nice_form


def best_move_pathwidth_dp(
    inst: TourInstance,
    k: int,
    *,
    decomposition: Literal["path", "tree"] = "path",
    settings: Settings | None = None,
) -> Move | None:
    """Best improving k-move by dynamic programming per feasible pattern.

    Parameters
    ----------
    decomposition: "path" | "tree"
        Which exact decomposition of the interaction graph drives the tables.
        Only "tree" produces join nodes.
    """
    settings = resolve(settings)
    index = SequentialIndex(inst).prepare(range(2, k + 1))

    def work(p: ConnectionPattern) -> Move | None:
        dp = _PatternDP(p, index)
        found = dp.run(decompose(p, decomposition))
        if found is None or found[0] <= 0:
            return None
        assignment = {s: e for j, edges in found[1] for s, e in zip(dp.comps[j], edges)}
        return finish(inst, p, assignment)

    patterns = feasible_patterns(k)
    found = best_improving(run_patterns(work, patterns, settings.threads))
    logger.debug("dp k=%d (%s) over %d patterns: %s", k, decomposition, len(patterns), found and found.gain)
    return found
