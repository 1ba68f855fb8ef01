"""Connection patterns: the abstract wiring of a k-swap.

A pattern on `k` slots is a perfect matching on the vertices `0..2k-1`.
Vertex `2s` stands for the left endpoint of the tour edge placed in slot `s`
and `2s + 1` for its right endpoint. Whether a swap is a move, and how it
splits into sequential pieces, depends on the pattern alone.
"""

from dataclasses import dataclass
from enum import Enum
import functools
import itertools
import logging
import re
from typing import Iterable, Iterator, Self, Sequence

import networkx as nx

from ._errors import NotAdmissibleError, PatternError
from .instance import Pair, Swap, TourInstance, pair

logger = logging.getLogger(__name__)

MAX_K = 10
CACHE_SIZE = 1 << 16


class PatternUniverse(str, Enum):
    """Which matchings count as patterns.

    ADMISSIBLE excludes every matching that pairs a slot's own two endpoints.
    APPENDIX is the set of all feasible matchings with such pairs allowed; it
    holds (k-1)! * 2^(k-1) patterns.
    """

    ADMISSIBLE = "admissible"
    APPENDIX = "appendix"


def _check_k(k: int) -> None:
    if not 1 <= k <= MAX_K:
        raise PatternError(
            f"Pattern enumeration supports 1 <= k <= {MAX_K}, got k={k}."
        )


@dataclass(frozen=True, slots=True)
class ConnectionPattern:
    """A fixed-point-free involution `mate` on `0..2k-1`.

    Matching a slot's left endpoint with its own right endpoint is rejected.
    """

    mate: tuple[int, ...]

    def __post_init__(self):
        _validate_involution(self.mate)
        for s in range(len(self.mate) // 2):
            if self.mate[2 * s] == 2 * s + 1:
                raise PatternError(
                    f"Pattern {format_mate(self.mate)} re-adds the removed edge of "
                    f"slot {s + 1}; such patterns only exist in the appendix universe."
                )

    @classmethod
    def _unchecked(cls, mate: tuple[int, ...]) -> Self:
        # Appendix universe patterns may pair a slot with itself.
        p = object.__new__(cls)
        object.__setattr__(p, "mate", mate)
        return p

    @classmethod
    def from_edges(cls, k: int, edges: Iterable[Pair]) -> Self:
        edges = list(edges)
        mate = [-1] * (2 * k)
        for a, b in edges:
            if not (0 <= a < 2 * k and 0 <= b < 2 * k) or a == b or mate[a] != -1 or mate[b] != -1:
                raise PatternError(
                    f"Edges {edges} do not form a perfect matching on 0..{2 * k - 1}."
                )
            mate[a], mate[b] = b, a
        return cls(tuple(mate))

    @property
    def k(self) -> int:
        return len(self.mate) // 2

    @property
    def edges(self) -> list[Pair]:
        return [(v, w) for v, w in enumerate(self.mate) if v < w]

    @property
    def has_null_slot(self) -> bool:
        return any(self.mate[2 * s] == 2 * s + 1 for s in range(self.k))

    def __str__(self) -> str:
        return format_pattern(self)


def _validate_involution(mate: Sequence[int]) -> None:
    size = len(mate)
    if size == 0 or size % 2:
        raise PatternError(f"A pattern needs an even, positive vertex count; got {size}.")
    for v, w in enumerate(mate):
        if not 0 <= w < size or w == v or mate[w] != v:
            raise PatternError(
                f"{list(mate)} is not a fixed-point-free involution (vertex {v} -> {w})."
            )


def _rebuild(mate: tuple[int, ...]) -> ConnectionPattern:
    """Checked construction, unless `mate` pairs a slot with itself."""
    if any(mate[2 * s] == 2 * s + 1 for s in range(len(mate) // 2)):
        _validate_involution(mate)
        return ConnectionPattern._unchecked(mate)
    return ConnectionPattern(mate)


@dataclass(frozen=True, slots=True)
class SubPattern:
    """The part of `parent` induced by a union of its sequential components."""

    parent: ConnectionPattern
    slots: tuple[int, ...]

    @property
    def edges(self) -> list[Pair]:
        vertices = {2 * s + side for s in self.slots for side in (0, 1)}
        return [(v, w) for v, w in self.parent.edges if v in vertices]

    @property
    def size(self) -> int:
        return len(self.slots)

    @property
    def pattern(self) -> ConnectionPattern:
        return restrict(self.parent, self.slots)


@dataclass(frozen=True, slots=True)
class Embedding:
    """Strictly increasing assignment of (some) slots to tour-edge indices."""

    slots: tuple[int, ...]
    edges: tuple[int, ...]

    def __post_init__(self):
        if len(self.slots) != len(self.edges):
            raise PatternError(
                f"Embedding maps {len(self.slots)} slots onto {len(self.edges)} edges."
            )
        if any(a >= b for a, b in itertools.pairwise(self.slots)) or any(
            a >= b for a, b in itertools.pairwise(self.edges)
        ):
            raise PatternError(
                f"Embedding {dict(zip(self.slots, self.edges))} is not strictly increasing."
            )

    @classmethod
    def total(cls, edges: Iterable[int]) -> Self:
        edges = tuple(edges)
        return cls(tuple(range(len(edges))), edges)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.slots, self.edges))


# ------------------------------------------------------------------------------
# Enumeration
# ------------------------------------------------------------------------------


def _all_mates(k: int) -> Iterator[tuple[int, ...]]:
    size = 2 * k
    mate = [-1] * size

    def rec(v: int) -> Iterator[tuple[int, ...]]:
        while v < size and mate[v] != -1:
            v += 1
        if v == size:
            yield tuple(mate)
            return
        for w in range(v + 1, size):
            if mate[w] != -1 or (v % 2 == 0 and w == v + 1):
                continue
            mate[v], mate[w] = w, v
            yield from rec(v + 1)
            mate[v] = mate[w] = -1

    yield from rec(0)


def _feasible_mates(k: int, allow_null_slots: bool) -> Iterator[tuple[int, ...]]:
    """Matchings closing the segment edges into one cycle, lexicographically.

    `end[v]` is the other end of the path fragment that currently ends at `v`.
    """
    size = 2 * k
    mate = [-1] * size
    end = [0] * size
    for s in range(k):
        a, b = 2 * s + 1, (2 * s + 2) % size
        end[a], end[b] = b, a

    def rec(v: int, matched: int) -> Iterator[tuple[int, ...]]:
        while v < size and mate[v] != -1:
            v += 1
        for w in range(v + 1, size):
            if mate[w] != -1:
                continue
            if not allow_null_slots and v % 2 == 0 and w == v + 1:
                continue
            if end[v] == w:
                # closing the fragment is only allowed once everything is on it
                if matched + 2 == size:
                    mate[v], mate[w] = w, v
                    yield tuple(mate)
                    mate[v] = mate[w] = -1
                continue
            a, b = end[v], end[w]
            mate[v], mate[w] = w, v
            end[a], end[b] = b, a
            yield from rec(v + 1, matched + 2)
            end[a], end[b] = v, w
            mate[v] = mate[w] = -1

    yield from rec(0, 0)


def enumerate_patterns(
    k: int,
    universe: PatternUniverse = PatternUniverse.ADMISSIBLE,
) -> Iterator[ConnectionPattern]:
    """Yield every pattern of `universe` on `k` slots, lexicographically by `mate`.

    The admissible universe holds feasible and infeasible patterns alike. The
    appendix universe only holds feasible ones.
    """
    _check_k(k)
    match universe:
        case PatternUniverse.ADMISSIBLE:
            for mate in _all_mates(k):
                yield ConnectionPattern._unchecked(mate)
        case PatternUniverse.APPENDIX:
            for mate in _feasible_mates(k, allow_null_slots=True):
                yield ConnectionPattern._unchecked(mate)


@functools.cache
def feasible_patterns(
    k: int, universe: PatternUniverse = PatternUniverse.ADMISSIBLE
) -> tuple[ConnectionPattern, ...]:
    """Every feasible pattern on `k` slots, cached per (k, universe)."""
    _check_k(k)
    allow = universe is PatternUniverse.APPENDIX
    catalogue = tuple(
        ConnectionPattern._unchecked(mate) for mate in _feasible_mates(k, allow)
    )
    logger.info("built %s catalogue for k=%d: %d patterns", universe.value, k, len(catalogue))
    return catalogue


@functools.cache
def improving_candidates(k: int) -> tuple[ConnectionPattern, ...]:
    """Feasible irreducible admissible patterns: the only ones that can hold the
    best improving k-move once no smaller improving move exists."""
    return tuple(p for p in feasible_patterns(k) if not is_reducible(p))


# ------------------------------------------------------------------------------
# Structure
# ------------------------------------------------------------------------------


def _segment(v: int, size: int) -> int:
    return (v + 1) % size if v % 2 else (v - 1) % size


@functools.lru_cache(maxsize=CACHE_SIZE)
def _cycle_length_from_zero(mate: tuple[int, ...]) -> int:
    size = len(mate)
    v, steps = 0, 0
    while True:
        v = _segment(mate[v], size)
        steps += 2
        if v == 0:
            return steps


def is_feasible(p: ConnectionPattern) -> bool:
    """True iff the pattern's canonical configuration is a single cycle.

    The canonical configuration joins vertex `2s + 1` to `2s + 2` (wrapping
    around) and adds the matching edges.
    """
    return _cycle_length_from_zero(p.mate) == len(p.mate)


@functools.lru_cache(maxsize=CACHE_SIZE)
def _components(mate: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    k = len(mate) // 2
    seen = [False] * k
    found = []
    for s in range(k):
        if seen[s]:
            continue
        slots = []
        v = 2 * s
        while True:
            slot = v // 2
            seen[slot] = True
            slots.append(slot)
            v = mate[v] ^ 1
            if v == 2 * s:
                break
        found.append(tuple(sorted(set(slots))))
    return tuple(found)


def sequential_decomposition(p: ConnectionPattern) -> list[SubPattern]:
    """Split `p` into sequential components, ordered by smallest slot.

    Following matching edges and the slot edges `{2s, 2s+1}` alternately, each
    component is one closed walk.
    """
    return [SubPattern(p, slots) for slots in _components(p.mate)]


def component_slots(p: ConnectionPattern) -> list[tuple[int, ...]]:
    """Slots of each sequential component, ordered by smallest slot."""
    return list(_components(p.mate))


def component_sizes(p: ConnectionPattern) -> tuple[int, ...]:
    return tuple(sorted(len(c) for c in _components(p.mate)))


def restrict(p: ConnectionPattern, slots: Iterable[int]) -> ConnectionPattern:
    """Relabel the sub-matching on `slots` onto `0..len(slots)-1`."""
    order = sorted(slots)
    rank = {s: t for t, s in enumerate(order)}
    mate = [0] * (2 * len(order))
    for s in order:
        for side in (0, 1):
            w = p.mate[2 * s + side]
            if (partner := rank.get(w // 2)) is None:
                raise PatternError(
                    f"Slots {order} are not a union of sequential components of {p}.",
                    pattern=p,
                )
            mate[2 * rank[s] + side] = 2 * partner + (w & 1)
    return _rebuild(tuple(mate))


def compose(k: int, parts: Iterable[tuple[Sequence[int], ConnectionPattern]]) -> ConnectionPattern:
    """Inverse of `restrict`: place each part's pattern on its slots."""
    mate = [-1] * (2 * k)
    for slots, part in parts:
        order = sorted(slots)
        if len(order) != part.k:
            raise PatternError(f"{part} has {part.k} slots but was given {order}.")
        for t, s in enumerate(order):
            for side in (0, 1):
                w = part.mate[2 * t + side]
                mate[2 * s + side] = 2 * order[w // 2] + (w & 1)
    if -1 in mate:
        raise PatternError(f"Parts do not cover all {k} slots.")
    _validate_involution(mate)
    return _rebuild(tuple(mate))


@functools.lru_cache(maxsize=CACHE_SIZE)
def _reducible_split(mate: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    p = ConnectionPattern._unchecked(mate)
    comps = _components(mate)
    c = len(comps)
    # component 0 always goes to the first group
    for mask in range(1, 1 << (c - 1)):
        first = sorted(
            itertools.chain(
                comps[0], *(comps[j + 1] for j in range(c - 1) if not mask >> j & 1)
            )
        )
        second = sorted(itertools.chain(*(comps[j + 1] for j in range(c - 1) if mask >> j & 1)))
        if is_feasible(restrict(p, first)) and is_feasible(restrict(p, second)):
            return tuple(first), tuple(second)
    return None


def reducible_split(p: ConnectionPattern) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Two slot groups, unions of sequential components, that are both feasible
    on their own; None when the pattern is irreducible."""
    if len(_components(p.mate)) < 2:
        return None
    return _reducible_split(p.mate)


def is_reducible(p: ConnectionPattern) -> bool:
    """True iff the sequential components split into two groups that are both
    feasible on their own."""
    return reducible_split(p) is not None


def interactions(p: ConnectionPattern, x: Iterable[int], y: Iterable[int]) -> int:
    """Number of slot indices i where i and i+1 sit on opposite sides of (x, y)."""
    x, y = set(x), set(y)
    if x & y:
        raise PatternError(f"Slot sets {sorted(x)} and {sorted(y)} overlap.", pattern=p)
    return sum(
        1
        for i in range(p.k - 1)
        if (i in x and i + 1 in y) or (i in y and i + 1 in x)
    )


def component_of(p: ConnectionPattern) -> list[int]:
    """Index of the sequential component holding each slot."""
    owner = [0] * p.k
    for j, slots in enumerate(_components(p.mate)):
        for s in slots:
            owner[s] = j
    return owner


def interaction_graph(p: ConnectionPattern) -> tuple[nx.Graph, nx.MultiGraph]:
    """The interaction graph of `p` and its cycle closure.

    The first graph joins two components when they interact. The second is the
    cycle on the slots, wrap-around edge included, with every component
    contracted to one vertex; it has exactly `k` edges.
    """
    owner = component_of(p)
    c = len(_components(p.mate))
    simple = nx.Graph()
    simple.add_nodes_from(range(c))
    closure = nx.MultiGraph()
    closure.add_nodes_from(range(c))
    for i in range(p.k):
        a, b = owner[i], owner[(i + 1) % p.k]
        closure.add_edge(a, b, slot=i)
        if i < p.k - 1 and a != b:
            simple.add_edge(a, b)
    return simple, closure


def swap_adjacent(p: ConnectionPattern, i: int) -> ConnectionPattern:
    """Exchange the roles of slots `i` and `i + 1`.

    The mates of `2i` and `2i + 2` are exchanged, and so are the mates of
    `2i + 1` and `2i + 3`; this is the pattern a swap fits once the tour edges
    in those two slots trade places.
    """
    if not 0 <= i < p.k - 1:
        raise PatternError(f"swap_adjacent needs 0 <= i < {p.k - 1}, got {i}.", pattern=p)

    def sigma(v: int) -> int:
        if 2 * i <= v < 2 * i + 2:
            return v + 2
        if 2 * i + 2 <= v < 2 * i + 4:
            return v - 2
        return v

    mate = [0] * len(p.mate)
    for v, w in enumerate(p.mate):
        mate[sigma(v)] = sigma(w)
    return _rebuild(tuple(mate))


def relaxable(p: ConnectionPattern, i: int) -> bool:
    """True when exchanging slots `i` and `i + 1` gives a feasible or a
    reducible pattern."""
    q = swap_adjacent(p, i)
    return is_feasible(q) or is_reducible(q)


# ------------------------------------------------------------------------------
# Realization
# ------------------------------------------------------------------------------


def endpoint(inst: TourInstance, edge: int, side: int) -> int:
    return inst.tour[(edge + side) % inst.n]


def realized_pairs(
    mate: Sequence[int], slots: Sequence[int], edges: Sequence[int], inst: TourInstance
) -> list[Pair] | None:
    """Concrete added pairs of the sub-matching on `slots` placed at `edges`.

    None when a pair is missing from the graph or two pairs coincide.
    """
    where = dict(zip(slots, edges))
    added = []
    for s in slots:
        for side in (0, 1):
            v = 2 * s + side
            w = mate[v]
            if w < v:
                continue
            a = endpoint(inst, where[s], side)
            b = endpoint(inst, where[w // 2], w & 1)
            if a == b or not inst.has_edge(a, b):
                return None
            added.append(pair(a, b))
    if len(set(added)) != len(added):
        return None
    return added


def realize(
    p: ConnectionPattern, f: Embedding | Sequence[int], inst: TourInstance
) -> Swap:
    """The concrete swap of pattern `p` at embedding `f`."""
    emb = f if isinstance(f, Embedding) else Embedding.total(f)
    if emb.slots != tuple(range(p.k)):
        raise PatternError(f"realize needs an embedding of all {p.k} slots.", pattern=p)
    if emb.edges and not (0 <= emb.edges[0] and emb.edges[-1] < inst.n):
        raise PatternError(f"Embedding {emb.edges} leaves the tour 0..{inst.n - 1}.")
    if p.has_null_slot:
        raise PatternError(
            f"{p} re-adds a removed edge and has no concrete realization.", pattern=p
        )
    added = realized_pairs(p.mate, emb.slots, emb.edges, inst)
    if added is None:
        raise NotAdmissibleError(
            f"Pattern {p} at tour edges {list(emb.edges)} needs a pair that is not "
            f"an edge of the graph.",
            pattern=p,
        )
    return Swap.build(inst, emb.edges, added)


# ------------------------------------------------------------------------------
# Text form
# ------------------------------------------------------------------------------


def format_mate(mate: Sequence[int]) -> str:
    k = len(mate) // 2
    edges = ", ".join(f"{v + 1}-{w + 1}" for v, w in enumerate(mate) if v < w)
    return f"{k}; {edges}"


def format_pattern(p: ConnectionPattern) -> str:
    """`k; a-b, c-d, ...` with 1-based vertices, sorted by smaller endpoint."""
    return format_mate(p.mate)


_PATTERN_RE = re.compile(r"^\s*(\d+)\s*;(.*)$")


def parse_pattern(text: str) -> ConnectionPattern:
    if (m := _PATTERN_RE.match(text)) is None:
        raise PatternError(f"{text!r} is not of the form 'k; a-b, c-d, ...'.")
    k = int(m.group(1))
    edges = []
    for chunk in filter(None, (c.strip() for c in m.group(2).split(","))):
        try:
            a, b = (int(x) for x in chunk.split("-"))
        except ValueError:
            raise PatternError(f"{chunk!r} is not an edge 'a-b' in {text!r}.") from None
        edges.append((a - 1, b - 1))
    return ConnectionPattern.from_edges(k, edges)
