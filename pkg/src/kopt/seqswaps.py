"""Sequential swaps as closed alternating walks.

A sequential swap alternates removed tour edges and added chords along one
closed walk. Walks are generated from their removed edge of smallest tour
index, traversed left to right; at every step a chord is picked at the
current vertex (at most d - 2 ways) and then one of the two tour edges at its
far end, so a single start yields at most (2(d - 2))^(l - 1) walks.
"""

from collections import defaultdict
import logging
from typing import Iterable, Iterator, NamedTuple

from ._errors import NotSequentialError, PatternError
from .instance import Pair, Swap, TourInstance, pair
from .patterns import ConnectionPattern, Embedding, SubPattern, restrict

logger = logging.getLogger(__name__)


class Walk(NamedTuple):
    """One closed alternating walk, reduced to what the solvers need.

    `edges` are the removed tour edges in increasing order and `shape` the
    mate array of the sequential pattern they realize, on slots 0..l-1.
    """

    edges: tuple[int, ...]
    shape: tuple[int, ...]
    added: tuple[Pair, ...]
    gain: int


def _walks_from(
    inst: TourInstance, start: int, length: int, chords: list[list[tuple[int, int]]]
) -> Iterator[Walk]:
    n = inst.n
    x0, x1 = inst.tour_edge(start)
    # steps[j] = (tour edge, side the walk enters it on)
    steps: list[tuple[int, int]] = [(start, 0)]
    used = {start}
    picked: list[tuple[int, int, int]] = []

    def emit() -> Walk | None:
        order = sorted(e for e, _ in steps)
        slot = {e: t for t, e in enumerate(order)}
        mate = [0] * (2 * length)
        for j, (e, entry) in enumerate(steps):
            nxt, nxt_entry = steps[(j + 1) % length]
            a = 2 * slot[e] + (1 - entry)
            b = 2 * slot[nxt] + nxt_entry
            mate[a], mate[b] = b, a
        added = [pair(u, v) for u, v, _ in picked]
        if len(set(added)) != len(added):
            return None
        gain = sum(inst.edge_weight(e) for e in order) - sum(w for *_, w in picked)
        return Walk(tuple(order), tuple(mate), tuple(added), gain)

    def rec(x: int) -> Iterator[Walk]:
        if len(steps) == length:
            for y, w in chords[x]:
                if y == x0:
                    picked.append((x, y, w))
                    if (walk := emit()) is not None:
                        yield walk
                    picked.pop()
            return
        for y, w in chords[x]:
            picked.append((x, y, w))
            p = inst.position[y]
            for edge, entry in ((p, 0), ((p - 1) % n, 1)):
                if edge <= start or edge in used:
                    continue
                steps.append((edge, entry))
                used.add(edge)
                yield from rec(inst.tour_edge(edge)[1 - entry])
                used.discard(edge)
                steps.pop()
            picked.pop()

    yield from rec(x1)


def walks(inst: TourInstance, length: int) -> Iterator[Walk]:
    """Every closed alternating walk with `length` removed edges."""
    if length < 2:
        raise PatternError(f"Sequential swaps remove at least 2 edges, got {length}.")
    chords = [inst.chords(v) for v in range(inst.n)]
    for start in range(inst.n):
        yield from _walks_from(inst, start, length, chords)


def count_sequential_bound(inst: TourInstance, length: int) -> int:
    """n * (2(d - 2))^(l - 1), the walk count bound for maximum degree d."""
    return inst.n * (2 * (inst.max_degree - 2)) ** (length - 1)


def enumerate_sequential_swaps(inst: TourInstance, length: int) -> Iterator[Swap]:
    """Each sequential swap with `length` removed edges, exactly once."""
    seen: set[tuple[frozenset[int], frozenset[Pair]]] = set()
    for walk in walks(inst, length):
        key = (frozenset(walk.edges), frozenset(walk.added))
        if key in seen:
            continue
        seen.add(key)
        yield Swap(removed=key[0], added=key[1], gain=walk.gain)


class SequentialIndex:
    """Walks of one instance grouped by the sequential pattern they realize.

    Built lazily per walk length; read-only once built, so one index can be
    shared by every pattern a solver looks at.
    """

    __slots__ = ("inst", "_by_length")

    def __init__(self, inst: TourInstance):
        self.inst = inst
        self._by_length: dict[int, dict[tuple[int, ...], list[tuple[tuple[int, ...], int]]]] = {}

    def _shapes(self, length: int) -> dict[tuple[int, ...], list[tuple[tuple[int, ...], int]]]:
        if (table := self._by_length.get(length)) is None:
            table = defaultdict(list)
            count = 0
            for walk in walks(self.inst, length):
                table[walk.shape].append((walk.edges, walk.gain))
                count += 1
            table = dict(table)
            self._by_length[length] = table
            logger.debug(
                "indexed %d walks of length %d into %d shapes", count, length, len(table)
            )
        return table

    def prepare(self, lengths: Iterable[int]) -> "SequentialIndex":
        """Build the tables for `lengths` up front, before sharing across threads."""
        for length in set(lengths):
            if length >= 2:
                self._shapes(length)
        return self

    def embeddings(self, shape: ConnectionPattern) -> list[tuple[tuple[int, ...], int]]:
        """(tour edges, gain) of every admissible placement of a sequential shape."""
        return self._shapes(shape.k).get(shape.mate, [])


def embeddings_of_subpattern(
    inst: TourInstance, sub: SubPattern, index: SequentialIndex | None = None
) -> Iterator[tuple[Embedding, int]]:
    """Placements of one sequential sub-pattern whose added pairs are chords.

    Yields the partial embedding on `sub.slots` with its gain. Relies on walk
    enumeration, so a component of size l costs O(n (2(d - 2))^(l - 1)).
    """
    shape = restrict(sub.parent, sub.slots)
    if sub.size == 1:
        return
    index = SequentialIndex(inst) if index is None else index
    for edges, gain in index.embeddings(shape):
        yield Embedding(sub.slots, edges), gain


def _certifying_walk(inst: TourInstance, s: Swap) -> list[tuple[int, int]] | None:
    order = sorted(s.removed)
    start = order[0]
    x0, x1 = inst.tour_edge(start)
    added_at: dict[int, list[int]] = defaultdict(list)
    for u, v in s.added:
        added_at[u].append(v)
        added_at[v].append(u)
    removed = set(order)
    steps: list[tuple[int, int]] = [(start, 0)]
    used_added: set[Pair] = set()
    used_removed = {start}

    def rec(x: int) -> bool:
        if len(steps) == len(order):
            return (
                pair(x, x0) in s.added
                and pair(x, x0) not in used_added
                and len(used_added) + 1 == len(s.added)
            )
        for y in added_at[x]:
            e = pair(x, y)
            if e in used_added:
                continue
            used_added.add(e)
            p = inst.position[y]
            for edge, entry in ((p, 0), ((p - 1) % inst.n, 1)):
                if edge not in removed or edge in used_removed:
                    continue
                steps.append((edge, entry))
                used_removed.add(edge)
                if rec(inst.tour_edge(edge)[1 - entry]):
                    return True
                used_removed.discard(edge)
                steps.pop()
            used_added.discard(e)
        return False

    return steps if rec(x1) else None


def canonical_sequential_pattern(s: Swap, inst: TourInstance) -> SubPattern:
    """The sequential pattern read off a certifying alternating walk of `s`.

    Slots follow tour order; the walk fixes which endpoint each added edge
    uses, so shared endpoints of adjacent removed edges are resolved the way
    the walk passes through them.
    """
    if len(s.removed) < 2 or len(s.removed) != len(s.added):
        raise NotSequentialError(
            f"A sequential swap removes and adds at least two edges each; got "
            f"{len(s.removed)} removed and {len(s.added)} added."
        )
    steps = _certifying_walk(inst, s)
    if steps is None:
        raise NotSequentialError(
            f"Swap removing {sorted(s.removed)} and adding {sorted(s.added)} is not "
            f"one closed alternating walk."
        )
    length = len(steps)
    slot = {e: t for t, e in enumerate(sorted(s.removed))}
    mate = [0] * (2 * length)
    for j, (e, entry) in enumerate(steps):
        nxt, nxt_entry = steps[(j + 1) % length]
        a = 2 * slot[e] + (1 - entry)
        b = 2 * slot[nxt] + nxt_entry
        mate[a], mate[b] = b, a
    pattern = ConnectionPattern(tuple(mate))
    return SubPattern(pattern, tuple(range(length)))
