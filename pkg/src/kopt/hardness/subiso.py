"""Partitioned subgraph isomorphism encoded as a cheaper-tour question on a
graph of maximum degree 3.

The graph is assembled from three gadgets:

* forcing gadgets, paths `x z y` whose middle vertex has degree 2;
* choice gadgets, cycles `x0 y0 z0 x1 y1 z1 ...` entered at some `x_i` and
  left at `y_i`; every edge from an `x` terminal to the outside weighs 2;
* domino gadgets, eight vertices that a tour crosses either from `x1` to `y1`
  or from `x2` to `y2`.

The starting tour visits every gadget along a fixed route and pays for one
extra weight-2 edge `e*`. A tour that avoids it exists iff the pattern embeds
into the host respecting the classes.

Vertex names read `gadget:role:index`, e.g. `Fv3:x:0`, `C2:y:1` or
`D1,1,2,1:a:0`.
"""

from dataclasses import dataclass
import itertools
import logging
from typing import Any, Iterable, Iterator, Mapping, Self

import networkx as nx

from .._errors import ReductionError
from ..instance import Infeasible, Move, Pair, Swap, TourInstance, pair, validate_swap
from ._graphfile import records

logger = logging.getLogger(__name__)

DOMINO_EDGES = (
    ("x1", "a"), ("a", "x2"), ("x2", "b"), ("b", "c"), ("c", "y2"),
    ("y2", "d"), ("d", "y1"), ("x1", "c"), ("b", "y1"),
)
DOMINO_PATHS = {
    1: ("x1", "a", "x2", "b", "c", "y2", "d", "y1"),
    2: ("x2", "a", "x1", "c", "b", "y1", "d", "y2"),
}


def k_prime(k: int) -> int:
    """Move size that always reaches the cheaper tour, for a pattern with `k` edges."""
    return 16 * k + 4


@dataclass(frozen=True, slots=True)
class PatternedHost:
    """A host graph whose vertices are labelled by pattern vertices.

    Parameters
    ----------
    host: nx.Graph
        The graph to search in.
    pattern: nx.Graph
        The graph to find, without isolated vertices.
    classes: Mapping[int, int]
        Pattern vertex each host vertex may stand for.
    """

    host: nx.Graph
    pattern: nx.Graph
    classes: Mapping[int, int]

    def __post_init__(self):
        if self.pattern.number_of_edges() == 0:
            raise ReductionError("The pattern graph has no edges.")
        if isolated := sorted(nx.isolates(self.pattern)):
            raise ReductionError(
                f"Pattern vertices {isolated} are isolated; remove them before "
                f"building the reduction, they match any host vertex of their class."
            )
        for v in self.host:
            if v not in self.classes:
                raise ReductionError(f"Host vertex {v} has no class.")
            if self.classes[v] not in self.pattern:
                raise ReductionError(
                    f"Host vertex {v} is in class {self.classes[v]}, which is not a "
                    f"pattern vertex."
                )

    @classmethod
    def from_edges(
        cls,
        pattern_edges: Iterable[Pair],
        classes: Mapping[int, int],
        host_edges: Iterable[Pair],
    ) -> Self:
        host = nx.Graph()
        host.add_nodes_from(classes)
        host.add_edges_from(host_edges)
        return cls(host, nx.Graph(list(pattern_edges)), dict(classes))

    @property
    def k(self) -> int:
        return self.pattern.number_of_edges()

    def members(self, i: int) -> list[int]:
        return sorted(v for v in self.host if self.classes[v] == i)

    def pruned(self) -> "PatternedHost":
        """Drop host edges that no pattern edge explains, then, until none is
        left, every host vertex lacking a neighbour in the class of some
        pattern neighbour of its own class."""
        host = nx.Graph()
        host.add_nodes_from(self.host)
        host.add_edges_from(
            (u, v) for u, v in self.host.edges
            if self.pattern.has_edge(self.classes[u], self.classes[v])
        )
        while doomed := [
            v for v in host
            if not set(self.pattern[self.classes[v]])
            <= {self.classes[u] for u in host[v]}
        ]:
            host.remove_nodes_from(doomed)
        return PatternedHost(host, self.pattern, {v: self.classes[v] for v in host})

    def embeddings(self) -> Iterator[dict[int, int]]:
        """Every class-respecting embedding of the pattern, by brute force."""
        order = sorted(self.pattern)
        for choice in itertools.product(*(self.members(i) for i in order)):
            phi = dict(zip(order, choice))
            if all(self.host.has_edge(phi[i], phi[j]) for i, j in self.pattern.edges):
                yield phi


class _Builder:
    """Named vertices and weighted edges, collected gadget by gadget."""

    def __init__(self):
        self.names: list[str] = []
        self.ids: dict[str, int] = {}
        self.weights: dict[Pair, int] = {}
        self.choice_x: set[int] = set()

    def vertex(self, gadget: str, role: str, index: int = 0) -> int:
        name = f"{gadget}:{role}:{index}"
        if (v := self.ids.get(name)) is None:
            v = self.ids[name] = len(self.names)
            self.names.append(name)
        return v

    def __getitem__(self, name: str) -> int:
        return self.ids[name]

    def internal(self, a: int, b: int) -> None:
        self.weights[pair(a, b)] = 1

    def link(self, a: int, b: int, weight: int | None = None) -> None:
        """Edge between two gadgets; weight 2 when it reaches a choice `x` terminal."""
        if weight is None:
            weight = 2 if a in self.choice_x or b in self.choice_x else 1
        self.weights[pair(a, b)] = weight

    def forcing(self, gadget: str) -> None:
        x, z, y = (self.vertex(gadget, r) for r in "xzy")
        self.internal(x, z)
        self.internal(z, y)

    def choice(self, gadget: str, size: int) -> None:
        cycle = [self.vertex(gadget, r, i) for i in range(size + 1) for r in "xyz"]
        for a, b in itertools.pairwise(cycle + cycle[:1]):
            self.internal(a, b)
        self.choice_x.update(cycle[0::3])

    def domino(self, gadget: str) -> None:
        for a, b in DOMINO_EDGES:
            self.internal(self._domino(gadget, a), self._domino(gadget, b))

    def _domino(self, gadget: str, role: str) -> int:
        return self.vertex(gadget, role[0], int(role[1:] or 0))

    # traversals, as vertex sequences

    def through_forcing(self, gadget: str) -> list[int]:
        return [self[f"{gadget}:{r}:0"] for r in "xzy"]

    def through_choice(self, gadget: str, i: int) -> list[int]:
        """From `x_i` backwards around the cycle to `y_i`."""
        triples = sum(1 for name in self.ids if name.startswith(f"{gadget}:x:"))
        cycle = [self[f"{gadget}:{r}:{t}"] for t in range(triples) for r in "xyz"]
        return [cycle[(3 * i - s) % len(cycle)] for s in range(len(cycle))]

    def through_domino(self, gadget: str, way: int) -> list[int]:
        return [self._domino(gadget, role) for role in DOMINO_PATHS[way]]


@dataclass(frozen=True)
class SubisoInstance:
    instance: TourInstance
    names: tuple[str, ...]
    beta: int
    """Weight of the starting tour."""
    choice_gadgets: int
    """L, the number of choice gadgets."""
    k: int
    source: PatternedHost
    """The pruned input."""
    order: tuple[int, ...]
    """Host vertices in gadget order."""
    arcs: tuple[tuple[int, int], ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def k_prime(self) -> int:
        return k_prime(self.k)

    def vertex(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ReductionError(f"No vertex is called {name!r}.") from None

    def gadgets(self) -> dict[str, list[int]]:
        """Vertex ids of every gadget, by gadget name."""
        layout: dict[str, list[int]] = {}
        for v, name in enumerate(self.names):
            layout.setdefault(name.split(":", 1)[0], []).append(v)
        return layout

    def manifest(self) -> dict[str, Any]:
        return {
            "reduction": "subiso",
            "n": self.instance.n,
            "beta": self.beta,
            "L": self.choice_gadgets,
            "k": self.k,
            "k_prime": self.k_prime,
            "names": list(self.names),
            "gadgets": self.gadgets(),
        }


def _rank(v: int, among: Iterable[int]) -> int:
    return sorted(among).index(v) + 1


class _Layout:
    """Gadget names and routes of one pruned input."""

    def __init__(self, ph: PatternedHost):
        self.ph = ph
        self.order = sorted(ph.host)
        self.arcs = sorted((u, v) for a, b in ph.host.edges for u, v in ((a, b), (b, a)))
        self.edges = sorted(
            (u, v) if ph.classes[u] < ph.classes[v] else (v, u) for u, v in ph.host.edges
        )

    def ip(self, u: int) -> tuple[int, int]:
        i = self.ph.classes[u]
        return i, _rank(u, self.ph.members(i))

    def nbr_classes(self, i: int) -> list[int]:
        return sorted(self.ph.pattern[i])

    def vertex_choice(self, u: int, j: int) -> str:
        i, p = self.ip(u)
        return f"C{i},{p},{j}"

    def nbrs_in(self, u: int, j: int) -> list[int]:
        return sorted(v for v in self.ph.host[u] if self.ph.classes[v] == j)

    def arc_domino(self, u: int, v: int) -> str:
        (i, p), (j, q) = self.ip(u), self.ip(v)
        return f"D{i},{p},{j},{q}"


def gen_subiso_instance(ph: PatternedHost) -> SubisoInstance:
    """Build the degree-3 instance whose starting tour can be improved iff the
    pattern embeds into the host respecting the classes.

    The input is pruned first; classes may end up empty, which only leaves
    their choice gadgets without alternatives.
    """
    ph = ph.pruned()
    lay = _Layout(ph)
    b = _Builder()
    classes = sorted(ph.pattern)
    n_host, m_host = len(lay.order), len(lay.edges)

    # choice gadgets per class, chained through their 0 terminals
    for i in classes:
        b.choice(f"C{i}", len(ph.members(i)))
    for i, j in itertools.pairwise(classes):
        b.link(b[f"C{i}:y:0"], b[f"C{j}:x:0"])

    # vertex stage
    b.forcing("Fv0")
    for ell, u in enumerate(lay.order, start=1):
        b.forcing(f"Fv{ell}")
        for j in lay.nbr_classes(ph.classes[u]):
            b.choice(lay.vertex_choice(u, j), len(lay.nbrs_in(u, j)))
    for ell, u in enumerate(lay.order, start=1):
        i, p = lay.ip(u)
        prev_y, here_x = b[f"Fv{ell - 1}:y:0"], b[f"Fv{ell}:x:0"]
        b.link(prev_y, b[f"C{i}:x:{p}"])
        b.link(b[f"C{i}:y:{p}"], here_x)
        chain = [lay.vertex_choice(u, j) for j in lay.nbr_classes(i)]
        b.link(prev_y, b[f"{chain[0]}:x:0"])
        for g, h in itertools.pairwise(chain):
            b.link(b[f"{g}:y:0"], b[f"{h}:x:0"])
        b.link(b[f"{chain[-1]}:y:0"], here_x)

    # arc stage
    b.forcing("Fa0")
    for ell, (u, v) in enumerate(lay.arcs, start=1):
        b.domino(lay.arc_domino(u, v))
        b.forcing(f"Fa{ell}")
        prev_y, here_x = b[f"Fa{ell - 1}:y:0"], b[f"Fa{ell}:x:0"]
        dom = lay.arc_domino(u, v)
        b.link(prev_y, b[f"{dom}:x:1"])
        b.link(b[f"{dom}:y:1"], here_x)
        choice = lay.vertex_choice(u, ph.classes[v])
        r = _rank(v, lay.nbrs_in(u, ph.classes[v]))
        b.link(prev_y, b[f"{choice}:x:{r}"])
        b.link(b[f"{choice}:y:{r}"], here_x)

    # edge stage
    b.forcing("Fe0")
    for ell, (u, v) in enumerate(lay.edges, start=1):
        b.forcing(f"Fe{ell}")
        prev_y, here_x = b[f"Fe{ell - 1}:y:0"], b[f"Fe{ell}:x:0"]
        first, second = lay.arc_domino(u, v), lay.arc_domino(v, u)
        b.link(prev_y, here_x)
        b.link(prev_y, b[f"{first}:x:2"])
        b.link(b[f"{first}:y:2"], b[f"{second}:x:2"])
        b.link(b[f"{second}:y:2"], here_x)

    # closing domino
    b.domino("D*")
    b.link(b[f"Fv{n_host}:y:0"], b["Fa0:x:0"])
    b.link(b[f"Fa{2 * m_host}:y:0"], b["Fe0:x:0"])
    b.link(b[f"Fe{m_host}:y:0"], b["D*:x:1"])
    b.link(b["D*:y:1"], b["Fv0:x:0"])
    b.link(b[f"Fe{m_host}:y:0"], b[f"C{classes[0]}:x:0"])
    b.link(b[f"C{classes[-1]}:y:0"], b["D*:x:2"])
    b.link(b["D*:y:2"], b["Fv0:x:0"], weight=2)

    tour = _route(b, lay, selected=set(), skip_edges=set())
    inst = TourInstance(
        n=len(b.names),
        tour=tuple(tour),
        edges=tuple((u, v, w) for (u, v), w in sorted(b.weights.items())),
        degree_bound=3,
    )
    choice_gadgets = len(classes) + sum(len(lay.nbr_classes(ph.classes[u])) for u in lay.order)
    beta = inst.n + 1 + choice_gadgets
    if inst.total_weight != beta:
        raise ReductionError(
            f"Starting tour weighs {inst.total_weight}, expected {beta}. This is a bug "
            f"in kopt."
        )
    logger.info(
        "subiso instance: %d vertices, beta=%d, L=%d, k'=%d",
        inst.n, beta, choice_gadgets, k_prime(ph.k),
    )
    return SubisoInstance(
        inst,
        tuple(b.names),
        beta,
        choice_gadgets,
        ph.k,
        ph,
        tuple(lay.order),
        tuple(lay.arcs),
        tuple(lay.edges),
    )


def _route(b: _Builder, lay: _Layout, selected: set[int], skip_edges: set[Pair]) -> list[int]:
    """The tour through every gadget. Host vertices in `selected` take their
    class gadget instead of their own choice gadgets; host edges in
    `skip_edges` take their choice gadgets instead of their dominoes and pick
    both dominoes up in the edge stage."""
    ph = lay.ph
    classes = sorted(ph.pattern)
    tour = b.through_forcing("Fv0")
    for ell, u in enumerate(lay.order, start=1):
        i, p = lay.ip(u)
        if u in selected:
            tour += b.through_choice(f"C{i}", p)
        else:
            for j in lay.nbr_classes(i):
                tour += b.through_choice(lay.vertex_choice(u, j), 0)
        tour += b.through_forcing(f"Fv{ell}")

    tour += b.through_forcing("Fa0")
    for ell, (u, v) in enumerate(lay.arcs, start=1):
        if pair(u, v) in skip_edges:
            choice = lay.vertex_choice(u, ph.classes[v])
            tour += b.through_choice(choice, _rank(v, lay.nbrs_in(u, ph.classes[v])))
        else:
            tour += b.through_domino(lay.arc_domino(u, v), 1)
        tour += b.through_forcing(f"Fa{ell}")

    tour += b.through_forcing("Fe0")
    for ell, (u, v) in enumerate(lay.edges, start=1):
        if pair(u, v) in skip_edges:
            tour += b.through_domino(lay.arc_domino(u, v), 2)
            tour += b.through_domino(lay.arc_domino(v, u), 2)
        tour += b.through_forcing(f"Fe{ell}")

    if selected:
        tour += b.through_domino("D*", 1)
    else:
        for i in classes:
            tour += b.through_choice(f"C{i}", 0)
        tour += b.through_domino("D*", 2)
    return tour


def _rebuild(si: SubisoInstance) -> tuple[_Builder, _Layout]:
    b = _Builder()
    b.names = list(si.names)
    b.ids = {name: v for v, name in enumerate(si.names)}
    return b, _Layout(si.source)


def witness_cycle(si: SubisoInstance, phi: Mapping[int, int]) -> tuple[int, ...]:
    """The tour of weight beta - 1 that a class-respecting embedding `phi`
    (pattern vertex -> host vertex) gives.

    Raises
    ------
    ReductionError
        If `phi` is not a class-respecting embedding of the pruned input.
    """
    ph = si.source
    for i in ph.pattern:
        if (u := phi.get(i)) is None or u not in ph.host or ph.classes[u] != i:
            raise ReductionError(
                f"phi maps pattern vertex {i} to {u}, which is not a host vertex of "
                f"class {i} that survived pruning."
            )
    for i, j in ph.pattern.edges:
        if not ph.host.has_edge(phi[i], phi[j]):
            raise ReductionError(
                f"Pattern edge {i}-{j} maps to {phi[i]}-{phi[j]}, which is not a host edge."
            )
    b, lay = _rebuild(si)
    selected = {phi[i] for i in ph.pattern}
    skip = {pair(phi[i], phi[j]) for i, j in ph.pattern.edges}
    return tuple(_route(b, lay, selected, skip))


def witness_move(si: SubisoInstance, phi: Mapping[int, int]) -> Move:
    """The move from the starting tour to `witness_cycle(si, phi)`."""
    inst = si.instance
    cycle = witness_cycle(si, phi)
    target = {pair(cycle[t], cycle[(t + 1) % len(cycle)]) for t in range(len(cycle))}
    removed = [i for i in range(inst.n) if pair(*inst.tour_edge(i)) not in target]
    current = {pair(*e) for e in inst.tour_edges}
    added = sorted(target - current)
    result = validate_swap(inst, Swap.build(inst, removed, added))
    if isinstance(result, Infeasible):
        raise ReductionError(
            f"The witness tour splits into {result.cycles} cycles. This is a bug in kopt."
        )
    return result


def parse_patterned_host(text: str | bytes) -> PatternedHost:
    """Read `pattern i j`, `vertex v i` and `edge u v` lines."""
    pattern_edges: list[Pair] = []
    classes: dict[int, int] = {}
    host_edges: list[Pair] = []
    grammar = {"pattern": (2, 2), "vertex": (2, 2), "edge": (2, 2)}
    for _, keyword, values in records(text, grammar):
        match keyword:
            case "pattern":
                pattern_edges.append((values[0], values[1]))
            case "vertex":
                classes[values[0]] = values[1]
            case "edge":
                host_edges.append((values[0], values[1]))
    return PatternedHost.from_edges(pattern_edges, classes, host_edges)
