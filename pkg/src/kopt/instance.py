"""Weighted graphs carrying a Hamiltonian tour, and the swaps applied to them."""

from collections import Counter
from dataclasses import dataclass, field, replace
import json
import logging
import random
from typing import Iterable, Self

from networkx.utils import UnionFind

from ._errors import (
    InstanceFormatError,
    InvalidInstanceError,
    InvalidSwapError,
    StaleMoveError,
)

logger = logging.getLogger(__name__)

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

Pair = tuple[int, int]
WeightedEdge = tuple[int, int, int]


def pair(u: int, v: int) -> Pair:
    return (u, v) if u < v else (v, u)


def checked(total: int) -> int:
    """Raise if `total` does not fit a signed 64-bit integer."""
    if not INT64_MIN <= total <= INT64_MAX:
        raise OverflowError(f"{total} does not fit in a signed 64-bit weight")
    return total


@dataclass(frozen=True, slots=True)
class TourInstance:
    """A simple weighted graph plus a Hamiltonian tour through it.

    Tour edge `i` joins `tour[i]` (its left endpoint) and `tour[(i + 1) % n]`
    (its right endpoint). Construction validates every structural rule and
    raises `InvalidInstanceError` on the first one broken.

    Parameters
    ----------
    n: int
        Number of vertices, labelled 0..n-1.
    tour: tuple[int, ...]
        The tour as a cyclic vertex sequence.
    edges: tuple[(u, v, w), ...]
        Every edge once with u < v, tour edges included.
    degree_bound: int | None
        Declared maximum degree. `None` uses the observed one.
    """

    n: int
    tour: tuple[int, ...]
    edges: tuple[WeightedEdge, ...]
    degree_bound: int | None = None
    adjacency: tuple[tuple[tuple[int, int], ...], ...] = field(
        init=False, repr=False, compare=False
    )
    position: tuple[int, ...] = field(init=False, repr=False, compare=False)
    total_weight: int = field(init=False, repr=False, compare=False)
    _weights: dict[Pair, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.n
        if n < 3:
            raise InvalidInstanceError(
                f"A tour needs at least 3 vertices, got n={n}."
            )
        weights: dict[Pair, int] = {}
        for u, v, w in self.edges:
            if u == v:
                raise InvalidInstanceError(f"Self-loop at vertex {u} is not allowed.")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidInstanceError(
                    f"Edge {u}-{v} references a vertex outside 0..{n - 1}."
                )
            if not INT64_MIN <= w <= INT64_MAX:
                raise InvalidInstanceError(
                    f"Weight {w} of edge {u}-{v} does not fit a signed 64-bit integer."
                )
            key = pair(u, v)
            if (previous := weights.get(key)) is not None and previous != w:
                raise InvalidInstanceError(
                    f"Edge {key[0]}-{key[1]} is listed twice with conflicting "
                    f"weights {previous} and {w}."
                )
            weights[key] = w
        canonical = tuple(sorted((u, v, w) for (u, v), w in weights.items()))

        if len(self.tour) != n or sorted(self.tour) != list(range(n)):
            raise InvalidInstanceError(
                f"Tour is not Hamiltonian: expected a permutation of 0..{n - 1}, "
                f"got {list(self.tour)}."
            )
        for i in range(n):
            u, v = self.tour[i], self.tour[(i + 1) % n]
            if pair(u, v) not in weights:
                raise InvalidInstanceError(
                    f"Tour is not Hamiltonian: consecutive vertices {u} and {v} "
                    f"(tour positions {i}, {(i + 1) % n}) are not joined by an edge."
                )

        neighbours: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for (u, v), w in sorted(weights.items()):
            neighbours[u].append((v, w))
            neighbours[v].append((u, w))
        if self.degree_bound is not None:
            for v, adj in enumerate(neighbours):
                if len(adj) > self.degree_bound:
                    raise InvalidInstanceError(
                        f"Vertex {v} has degree {len(adj)}, above the declared "
                        f"bound d={self.degree_bound}."
                    )
        position = [0] * n
        for i, v in enumerate(self.tour):
            position[v] = i

        object.__setattr__(self, "edges", canonical)
        object.__setattr__(
            self, "adjacency", tuple(tuple(sorted(adj)) for adj in neighbours)
        )
        object.__setattr__(self, "position", tuple(position))
        object.__setattr__(self, "_weights", weights)
        object.__setattr__(
            self,
            "total_weight",
            checked(sum(weights[pair(*self.tour_edge(i))] for i in range(n))),
        )

    @classmethod
    def from_edges(
        cls,
        tour: Iterable[int],
        edges: Iterable[WeightedEdge],
        degree_bound: int | None = None,
    ) -> Self:
        tour = tuple(tour)
        return cls(
            n=len(tour),
            tour=tour,
            edges=tuple(pair(u, v) + (w,) for u, v, w in edges),
            degree_bound=degree_bound,
        )

    @property
    def max_degree(self) -> int:
        return max(len(adj) for adj in self.adjacency)

    @property
    def tour_edges(self) -> list[Pair]:
        n = self.n
        return [(self.tour[i], self.tour[(i + 1) % n]) for i in range(n)]

    def tour_edge(self, i: int) -> Pair:
        """(left, right) endpoints of tour edge `i`."""
        return self.tour[i], self.tour[(i + 1) % self.n]

    def has_edge(self, u: int, v: int) -> bool:
        return pair(u, v) in self._weights

    def weight(self, u: int, v: int) -> int:
        try:
            return self._weights[pair(u, v)]
        except KeyError:
            raise InvalidSwapError(f"{u}-{v} is not an edge of the graph.") from None

    def edge_index(self, u: int, v: int) -> int | None:
        """Index of the tour edge joining `u` and `v`, if there is one."""
        n = self.n
        pu, pv = self.position[u], self.position[v]
        if (pu + 1) % n == pv:
            return pu
        if (pv + 1) % n == pu:
            return pv
        return None

    def is_chord(self, u: int, v: int) -> bool:
        """True for graph edges that are not on the tour."""
        return self.has_edge(u, v) and self.edge_index(u, v) is None

    def chords(self, v: int) -> list[tuple[int, int]]:
        """(neighbour, weight) for every chord at `v`, by neighbour."""
        return [(u, w) for u, w in self.adjacency[v] if self.edge_index(u, v) is None]

    def edge_weight(self, i: int) -> int:
        return self._weights[pair(*self.tour_edge(i))]


@dataclass(frozen=True, slots=True)
class Swap:
    """An exchange of tour edges `removed` (by index) for vertex pairs `added`."""

    removed: frozenset[int]
    added: frozenset[Pair]
    gain: int

    @classmethod
    def build(
        cls, inst: TourInstance, removed: Iterable[int], added: Iterable[Pair]
    ) -> Self:
        removed = frozenset(removed)
        added = frozenset(pair(u, v) for u, v in added)
        gain = sum(inst.edge_weight(i) for i in removed) - sum(
            inst.weight(u, v) for u, v in added
        )
        return cls(removed=removed, added=added, gain=checked(gain))

    @property
    def k(self) -> int:
        return len(self.removed)

    def sort_key(self) -> tuple[int, tuple[int, ...], tuple[Pair, ...]]:
        """Best first: higher gain, then lexicographically smaller edge lists."""
        return (-self.gain, tuple(sorted(self.removed)), tuple(sorted(self.added)))


@dataclass(frozen=True, slots=True)
class Move(Swap):
    """A swap whose result is a single Hamiltonian cycle."""

    removed_pairs: frozenset[Pair] = frozenset()
    resulting_weight: int = 0


@dataclass(frozen=True, slots=True)
class Infeasible:
    swap: Swap
    cycles: int


def best(moves: Iterable[Move | None]) -> Move | None:
    """Best move under the global tie-break, ignoring `None`."""
    found = [m for m in moves if m is not None]
    return min(found, key=Move.sort_key) if found else None


def random_instance(
    n: int,
    *,
    seed: int,
    degree: int = 3,
    max_weight: int = 5,
    min_weight: int = 1,
) -> TourInstance:
    """The tour 0..n-1 plus random chords, every vertex of degree at most `degree`.

    Chords come from `degree - 2` random perfect matchings; pairs that would
    repeat an edge or exceed the degree are skipped.
    """
    if n < 3 or degree < 2:
        raise ValueError(f"Need n >= 3 and degree >= 2, got n={n}, degree={degree}.")
    rng = random.Random(seed)
    weights = {pair(i, (i + 1) % n): rng.randint(min_weight, max_weight) for i in range(n)}
    deg = [2] * n
    for _ in range(degree - 2):
        order = list(range(n))
        rng.shuffle(order)
        for u, v in zip(order[0::2], order[1::2]):
            if pair(u, v) in weights or deg[u] >= degree or deg[v] >= degree:
                continue
            weights[pair(u, v)] = rng.randint(min_weight, max_weight)
            deg[u] += 1
            deg[v] += 1
    return TourInstance.from_edges(
        range(n), [(u, v, w) for (u, v), w in weights.items()], degree_bound=degree
    )


def tour_weight(inst: TourInstance) -> int:
    return checked(sum(inst.edge_weight(i) for i in range(inst.n)))


def count_cycles(inst: TourInstance, removed: Iterable[int], added: Iterable[Pair]) -> int:
    """Number of cycles in (tour - removed) + added.

    Works on the contracted graph whose nodes are the endpoints of removed
    edges; the remaining tour paths become single links between them.
    """
    order = sorted(removed)
    m = len(order)
    if m == 0:
        return 1
    uf = UnionFind()
    slots_of: dict[int, list[tuple[int, int]]] = {}
    for j, i in enumerate(order):
        left, right = inst.tour_edge(i)
        slots_of.setdefault(left, []).append((j, 0))
        slots_of.setdefault(right, []).append((j, 1))
        uf.union((j, 1), ((j + 1) % m, 0))
    for u, v in added:
        a = slots_of[u].pop()
        b = slots_of[v].pop()
        uf.union(a, b)
    return len({uf[(j, side)] for j in range(m) for side in (0, 1)})


def validate_swap(inst: TourInstance, s: Swap) -> Move | Infeasible:
    """Check a swap against the tour and recompute its gain.

    Returns a `Move` when the exchange leaves one Hamiltonian cycle and
    `Infeasible` with the cycle count otherwise.
    """
    for i in s.removed:
        if not 0 <= i < inst.n:
            raise InvalidSwapError(
                f"Removed edge index {i} is not a tour edge; indices run 0..{inst.n - 1}."
            )
    for u, v in s.added:
        if u == v or not inst.has_edge(u, v):
            raise InvalidSwapError(
                f"Added pair {u}-{v} is not an edge of the graph, so it cannot "
                f"be part of a tour."
            )
    if len(s.removed) != len(s.added):
        raise InvalidSwapError(
            f"A swap removes and adds the same number of edges; got "
            f"{len(s.removed)} removed and {len(s.added)} added."
        )
    removed_pairs = frozenset(pair(*inst.tour_edge(i)) for i in s.removed)
    if Counter(v for e in removed_pairs for v in e) != Counter(
        v for e in s.added for v in e
    ):
        raise InvalidSwapError(
            "Endpoints of the removed edges and of the added edges differ; every "
            "vertex must lose exactly as many tour edges as it gains."
        )
    exact = Swap.build(inst, s.removed, s.added)
    cycles = count_cycles(inst, s.removed, s.added)
    if cycles != 1:
        return Infeasible(swap=exact, cycles=cycles)
    return Move(
        removed=exact.removed,
        added=exact.added,
        gain=exact.gain,
        removed_pairs=removed_pairs,
        resulting_weight=checked(inst.total_weight - exact.gain),
    )


def apply_move(inst: TourInstance, m: Move) -> TourInstance:
    """The instance whose tour is the cycle `m` leads to.

    The new tour starts at the old `tour[0]` and first steps to whichever of
    its two new neighbours comes earlier on the old tour.
    """
    current = {pair(*inst.tour_edge(i)): i for i in m.removed}
    if set(current) != m.removed_pairs:
        raise StaleMoveError(
            f"Move removes {sorted(m.removed_pairs)} but tour edges "
            f"{sorted(m.removed)} are now {sorted(current)}. Search the current "
            f"tour again instead of replaying an old move."
        )
    n = inst.n
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for i in range(n):
        if i in m.removed:
            continue
        u, v = inst.tour_edge(i)
        nbrs[u].append(v)
        nbrs[v].append(u)
    for u, v in m.added:
        nbrs[u].append(v)
        nbrs[v].append(u)

    start = inst.tour[0]
    prev, cur = start, min(nbrs[start], key=lambda v: inst.position[v])
    tour = [start]
    while cur != start:
        tour.append(cur)
        a, b = nbrs[cur]
        prev, cur = cur, (b if a == prev else a)
    if len(tour) != n:
        raise StaleMoveError(
            f"Move does not produce a Hamiltonian cycle on this tour "
            f"({len(tour)} of {n} vertices reached)."
        )
    logger.debug("applied move of gain %d", m.gain)
    return replace(inst, tour=tuple(tour))


# ------------------------------------------------------------------------------
# Text formats
# ------------------------------------------------------------------------------


def _ints(line: str, lineno: int, expected: int | None = None) -> list[int]:
    values = []
    column = 1
    for token in line.split():
        column = line.index(token, column - 1) + 1
        try:
            values.append(int(token))
        except ValueError:
            raise InstanceFormatError(
                f"expected an integer, found {token!r}", lineno, column
            ) from None
        column += len(token)
    if expected is not None and len(values) != expected:
        raise InstanceFormatError(
            f"expected {expected} integers, found {len(values)}", lineno, 1
        )
    return values


def parse_instance(text: str | bytes) -> TourInstance:
    """Parse the line-oriented instance format.

    Line 1 is `n m d`, line 2 the tour, then `m` lines `u v w`. Blank lines and
    lines starting with `#` are skipped.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = [
        (lineno, line)
        for lineno, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not lines:
        raise InstanceFormatError("empty instance, expected a `n m d` header", 1)
    header_no, header = lines[0]
    n, m, d = _ints(header, header_no, 3)
    if len(lines) < 2:
        raise InstanceFormatError("missing tour line", header_no + 1)
    tour_no, tour_line = lines[1]
    tour = _ints(tour_line, tour_no, n)
    body = lines[2:]
    if len(body) != m:
        last = body[-1][0] + 1 if body else tour_no + 1
        raise InstanceFormatError(
            f"header announces {m} edges but {len(body)} edge lines follow", last
        )
    edges = [tuple(_ints(line, lineno, 3)) for lineno, line in body]
    return TourInstance(
        n=n,
        tour=tuple(tour),
        edges=tuple((u, v, w) if u < v else (v, u, w) for u, v, w in edges),
        degree_bound=d,
    )


def serialize_instance(inst: TourInstance) -> str:
    d = inst.degree_bound if inst.degree_bound is not None else inst.max_degree
    lines = [
        f"{inst.n} {len(inst.edges)} {d}",
        " ".join(map(str, inst.tour)),
        *(f"{u} {v} {w}" for u, v, w in inst.edges),
    ]
    return "\n".join(lines) + "\n"


def move_to_json(m: Move) -> str:
    return json.dumps(
        {
            "gain": m.gain,
            "remove": [list(e) for e in sorted(m.removed_pairs)],
            "add": [list(e) for e in sorted(m.added)],
        },
        separators=(",", ":"),
    )
