"""Tripartite triangle detection encoded as 9-opt detection on a subcubic graph.

Every vertex `v` of the tripartite graph gets a stretch of the tour, its
extended scope, of `6 |N(v) & Y| + 3 |N(v) & Z| - 1` vertices. Edges towards
the next part become nested chords over the scope, edges from the previous
part become marked tour edges in its centre. Each edge `xy` then yields one
3-swap `S(x, y)`, and three of them close into a single cheaper tour exactly
when `x`, `y` and a third vertex form a triangle.

In unit mode the heavy tour edge of `S(x, y)` weighs 2 on A-B arcs and 1
elsewhere. In negative mode it weighs `1 - w'(xy)` instead, where `w'` is
the tripartite edge weight, so the move closing a triangle gains exactly
minus the triangle's weight and improves iff the triangle is negative.

Left and right follow the tour order everywhere: the A scopes come first,
then the B scopes, then the C scopes, and the tour closes back to A.
"""

from dataclasses import dataclass, field
from enum import Enum
import itertools
import logging
from typing import Any, Iterable, Iterator, Mapping, Self

import networkx as nx

from .._errors import ReductionError
from ..instance import (
    Infeasible,
    Move,
    Pair,
    Swap,
    TourInstance,
    best,
    count_cycles,
    pair,
    validate_swap,
)
from ._graphfile import records

logger = logging.getLogger(__name__)

PARTS = ("A", "B", "C")
MAX_MOVE_SWAPS = 3


class TriangleMode(str, Enum):
    UNIT = "unit"
    """Weights in {1, 2}; any triangle gives a move of gain 1."""
    NEGATIVE = "negative"
    """Edge weights of the input carry over; a move's gain is minus the
    total weight of its triangle."""


@dataclass(frozen=True, slots=True)
class TripartiteGraph:
    """A graph on three independent vertex sets.

    `weights` is only read in negative mode; missing entries count as 0.
    """

    a: frozenset[int]
    b: frozenset[int]
    c: frozenset[int]
    edges: frozenset[Pair]
    weights: Mapping[Pair, int] = field(default_factory=dict)

    def __post_init__(self):
        for (x, name_x), (y, name_y) in itertools.combinations(
            zip(self.parts, PARTS), 2
        ):
            if shared := x & y:
                raise ReductionError(
                    f"Parts {name_x} and {name_y} share vertices {sorted(shared)}; "
                    f"the three parts must be disjoint."
                )
        part = self.part_of
        for u, v in self.edges:
            for w in (u, v):
                if w not in part:
                    raise ReductionError(
                        f"Edge {u}-{v} uses vertex {w}, which belongs to no part."
                    )
            if part[u] == part[v]:
                raise ReductionError(
                    f"Edge {u}-{v} lies inside part {PARTS[part[u]]}; the parts must "
                    f"be independent sets."
                )

    @classmethod
    def from_edges(
        cls,
        a: Iterable[int],
        b: Iterable[int],
        c: Iterable[int],
        edges: Iterable[tuple[int, ...]],
    ) -> Self:
        """Build from `(u, v)` or weighted `(u, v, w)` tuples."""
        plain: set[Pair] = set()
        weights: dict[Pair, int] = {}
        for edge in edges:
            key = pair(edge[0], edge[1])
            plain.add(key)
            if len(edge) > 2:
                weights[key] = edge[2]
        return cls(frozenset(a), frozenset(b), frozenset(c), frozenset(plain), weights)

    @property
    def parts(self) -> tuple[frozenset[int], frozenset[int], frozenset[int]]:
        return self.a, self.b, self.c

    @property
    def part_of(self) -> dict[int, int]:
        return {v: i for i, part in enumerate(self.parts) for v in part}

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        for i, part in enumerate(self.parts):
            g.add_nodes_from(part, part=i)
        g.add_edges_from(self.edges)
        return g

    def weight(self, u: int, v: int) -> int:
        return self.weights.get(pair(u, v), 0)

    def triangles(self) -> Iterator[tuple[int, int, int]]:
        """Every triangle as (a, b, c), one vertex per part."""
        g = self.graph()
        for x in sorted(self.a):
            for y in sorted(set(g[x]) & self.b):
                for z in sorted(nx.common_neighbors(g, x, y)):
                    yield x, y, z

    def has_triangle(self) -> bool:
        return next(self.triangles(), None) is not None

    def min_triangle_weight(self) -> int | None:
        return min(
            (self.weight(x, y) + self.weight(y, z) + self.weight(z, x)
             for x, y, z in self.triangles()),
            default=None,
        )

    def pruned(self) -> "TripartiteGraph":
        """Drop, until none is left, every vertex missing a neighbour in one
        of the other two parts. Such vertices lie on no triangle."""
        g = self.graph()
        part = self.part_of
        while doomed := [
            v for v in g
            if len({part[u] for u in g[v]}) < 2
        ]:
            g.remove_nodes_from(doomed)
        keep = set(g)
        return TripartiteGraph(
            self.a & keep,
            self.b & keep,
            self.c & keep,
            frozenset(pair(u, v) for u, v in g.edges),
            {e: w for e, w in self.weights.items() if e[0] in keep and e[1] in keep},
        )


@dataclass(frozen=True, slots=True)
class CatalogueSwap:
    """The 3-swap S(x, y) built for the oriented edge x -> y."""

    arc: tuple[int, int]
    swap: Swap
    removed_pairs: frozenset[Pair]


@dataclass(frozen=True)
class TriangleInstance:
    instance: TourInstance
    catalogue: tuple[CatalogueSwap, ...]
    names: tuple[str, ...]
    mode: TriangleMode
    source: TripartiteGraph

    def vertex(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ReductionError(f"No vertex is called {name!r}.") from None

    def manifest(self) -> dict[str, Any]:
        return {
            "reduction": "triangle",
            "mode": self.mode.value,
            "n": self.instance.n,
            "names": list(self.names),
            "catalogue": [
                {
                    "arc": list(s.arc),
                    "gain": s.swap.gain,
                    "remove": [list(e) for e in sorted(s.removed_pairs)],
                    "add": [list(e) for e in sorted(s.swap.added)],
                }
                for s in self.catalogue
            ],
        }


class _Scope:
    """Tour positions of one extended scope."""

    __slots__ = ("v", "start", "size", "forward", "backward")

    def __init__(self, v: int, start: int, forward: list[int], backward: list[int]):
        self.v = v
        self.start = start
        self.forward = forward
        self.backward = backward
        self.size = 6 * len(forward) + 3 * len(backward) - 1

    def at(self, i: int) -> int:
        """Vertex id at 1-based scope index `i`."""
        return self.start + i - 1

    def chord(self, y: int) -> tuple[int, int, int, int]:
        """(outer left, left, right, outer right) around the chord towards `y`."""
        j = self.forward.index(y)
        left, right = 2 + 3 * j, self.size - 1 - 3 * j
        return self.at(left - 1), self.at(left), self.at(right), self.at(right + 1)

    def marked(self, x: int) -> tuple[int, int]:
        """Endpoints of the central tour edge standing for the edge from `x`."""
        centre = 3 * len(self.forward) - 1
        t = 3 * (self.backward.index(x) + 1)
        u = self.at(centre + t - 1)
        return u, u + 1


def _trivial(t: TripartiteGraph, mode: TriangleMode) -> TriangleInstance:
    names = tuple(f"corner:{p}:0" for p in PARTS)
    inst = TourInstance.from_edges(range(3), [(0, 1, 1), (1, 2, 1), (0, 2, 1)], degree_bound=3)
    return TriangleInstance(inst, (), names, mode, t)


def gen_triangle_instance(
    t: TripartiteGraph, mode: TriangleMode | str = TriangleMode.UNIT
) -> TriangleInstance:
    """Build the subcubic tour instance that has an improving move of at most
    9 edges iff `t` has a triangle (a negative one in NEGATIVE mode).

    Vertices that cannot lie on a triangle are pruned first. If nothing is
    left, the result is a bare triangle tour with an empty catalogue.

    Raises
    ------
    ReductionError
        If `t` has no edges.
    """
    mode = TriangleMode(mode)
    if not t.edges:
        raise ReductionError("The tripartite graph has no edges, so there is nothing to encode.")
    pruned = t.pruned()
    if not pruned.edges:
        logger.info("every vertex was pruned; emitting a bare tour")
        return _trivial(t, mode)
    g = pruned.graph()

    names: list[str] = []
    scopes: dict[int, _Scope] = {}
    for side, part in enumerate(pruned.parts):
        forward_part = pruned.parts[(side + 1) % 3]
        backward_part = pruned.parts[(side + 2) % 3]
        for v in sorted(part):
            nbrs = set(g[v])
            scope = _Scope(
                v,
                len(names),
                sorted(nbrs & forward_part),
                sorted(nbrs & backward_part),
            )
            scopes[v] = scope
            names.extend(f"scope{v}:path:{i}" for i in range(1, scope.size + 1))
            names.append(f"scope{v}:link:0")
    n = len(names)

    weights = {pair(i, (i + 1) % n): 1 for i in range(n)}
    arcs: list[tuple[int, int, int]] = []
    for side, part in enumerate(pruned.parts):
        for x in sorted(part):
            for y in scopes[x].forward:
                arcs.append((side, x, y))

    parts_of_swaps: list[tuple[tuple[int, int], list[int], list[Pair]]] = []
    for side, x, y in arcs:
        outer_left, left, right, outer_right = scopes[x].chord(y)
        u, v = scopes[y].marked(x)
        match mode:
            case TriangleMode.UNIT:
                heavy = 2 if side == 0 else 1
            case TriangleMode.NEGATIVE:
                heavy = 1 - pruned.weight(x, y)
        weights[pair(outer_left, left)] = heavy
        chords = [pair(left, right), pair(outer_left, v), pair(outer_right, u)]
        for e in chords:
            weights[e] = 1
        parts_of_swaps.append(((x, y), [outer_left, right, u], chords))

    inst = TourInstance.from_edges(
        range(n), [(u, v, w) for (u, v), w in weights.items()], degree_bound=3
    )
    catalogue = tuple(
        CatalogueSwap(
            arc,
            Swap.build(inst, removed, added),
            frozenset(pair(*inst.tour_edge(i)) for i in removed),
        )
        for arc, removed, added in parts_of_swaps
    )
    logger.info(
        "triangle instance: %d vertices, %d catalogue swaps (%s mode)",
        n, len(catalogue), mode.value,
    )
    return TriangleInstance(inst, catalogue, tuple(names), mode, t)


def restricted_oracle_9opt(ti: TriangleInstance) -> Move | None:
    """Best improving move made of at most three catalogue swaps.

    Every move of at most 9 edges on a generated instance is such a union, so
    this agrees with an exhaustive search at a fraction of the cost.

    Raises
    ------
    ReductionError
        If the catalogue does not belong to the instance's tour.
    """
    inst = ti.instance
    for s in ti.catalogue:
        current = {pair(*inst.tour_edge(i)) for i in s.swap.removed}
        if current != s.removed_pairs:
            raise ReductionError(
                f"Catalogue swap {s.arc} removes {sorted(s.removed_pairs)}, but the "
                f"instance has {sorted(current)} there. Generate the catalogue from "
                f"this instance with gen_triangle_instance."
            )

    moves: list[Move] = []
    for size in range(1, MAX_MOVE_SWAPS + 1):
        for combo in itertools.combinations(ti.catalogue, size):
            gain = sum(s.swap.gain for s in combo)
            if gain <= 0:
                continue
            removed = frozenset().union(*(s.swap.removed for s in combo))
            added = frozenset().union(*(s.swap.added for s in combo))
            if count_cycles(inst, removed, added) != 1:
                continue
            result = validate_swap(inst, Swap(removed, added, gain))
            if not isinstance(result, Infeasible):
                moves.append(result)
    found = best(moves)
    logger.debug("restricted oracle: %d candidate moves", len(moves))
    return found


def parse_tripartite(text: str | bytes) -> TripartiteGraph:
    """Read `A ...`, `B ...`, `C ...` part lines and `edge u v [w]` lines."""
    parts: dict[str, list[int]] = {p: [] for p in PARTS}
    edges: list[tuple[int, ...]] = []
    grammar = {p: (1, -1) for p in PARTS} | {"edge": (2, 3)}
    for _, keyword, values in records(text, grammar):
        if keyword == "edge":
            edges.append(tuple(values))
        else:
            parts[keyword].extend(values)
    return TripartiteGraph.from_edges(parts["A"], parts["B"], parts["C"], edges)
