"""Static orthogonal range trees answering maximum-priority queries.

Besides the plain query, a tree built with `distinct_dim` keeps, per node, the
three best points with pairwise different coordinates in that dimension, which
is enough to answer "best point whose coordinate avoids up to two values".

`PairStructure` answers the two pair queries used by the 8-move engine: find
p in a 3-d set and q in a 2-d set inside boxes with p below q in x, or in
both x and y.
"""

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
import logging
from typing import Any, Iterable, Sequence

logger = logging.getLogger(__name__)

Interval = tuple[int, int]


@dataclass(frozen=True, slots=True)
class PrioritizedPoint:
    """A point with a priority; `payload` breaks ties, smaller first."""

    coords: tuple[int, ...]
    priority: int
    payload: Any = None


def _pow2(m: int) -> int:
    size = 1
    while size < m:
        size *= 2
    return size


def _cover(size: int, lo: int, hi: int) -> list[int]:
    """Nodes of a perfect binary tree with `size` leaves covering leaves [lo, hi),
    from left to right."""
    left, right = [], []
    lo += size
    hi += size
    while lo < hi:
        if lo & 1:
            left.append(lo)
            lo += 1
        if hi & 1:
            hi -= 1
            right.append(hi)
        lo >>= 1
        hi >>= 1
    return left + right[::-1]


def _slice(keys: Sequence[int], interval: Interval) -> tuple[int, int]:
    lo, hi = interval
    return bisect_left(keys, lo), bisect_right(keys, hi)


class _Layer:
    __slots__ = ("keys", "ids", "size", "sub", "top")

    def __init__(self, tree: "RangeTree", ids: list[int], dim: int):
        coords = tree._coords
        self.ids = sorted(ids, key=lambda i: (coords[i][dim], i))
        self.keys = [coords[i][dim] for i in self.ids]
        self.size = size = _pow2(len(self.ids))
        # sub[j] is the next layer, or the point id when node j holds one point
        self.sub: list[_Layer | int | None] = []
        self.top: list[list[int]] = []
        if dim + 1 < tree.dims:
            members: list[list[int]] = [[] for _ in range(2 * size)]
            for pos, i in enumerate(self.ids):
                members[size + pos] = [i]
            for j in range(size - 1, 0, -1):
                members[j] = members[2 * j] + members[2 * j + 1]
            self.sub = [
                None if not m else m[0] if len(m) == 1 else _Layer(tree, m, dim + 1)
                for m in members
            ]
        else:
            self.top = [[] for _ in range(2 * size)]
            for pos, i in enumerate(self.ids):
                self.top[size + pos] = [i]
            for j in range(size - 1, 0, -1):
                self.top[j] = tree._merge(self.top[2 * j], self.top[2 * j + 1])

    def query(
        self,
        tree: "RangeTree",
        box: Sequence[Interval],
        dim: int,
        forbidden: frozenset[int],
    ) -> int | None:
        lo, hi = _slice(self.keys, box[dim])
        best: int | None = None
        last = dim + 1 == tree.dims
        for j in _cover(self.size, lo, hi):
            if last:
                found = tree._first_allowed(self.top[j], forbidden)
            else:
                match self.sub[j]:
                    case None:
                        found = None
                    case int(i):
                        found = i if tree._inside(i, box, dim + 1, forbidden) else None
                    case sub:
                        found = sub.query(tree, box, dim + 1, forbidden)
            if found is not None and (best is None or found < best):
                best = found
        return best


class RangeTree:
    """Immutable range tree over `dims`-dimensional prioritized points.

    Points are ranked once by (priority descending, payload, input order); all
    internal comparisons use those ranks.
    """

    __slots__ = ("dims", "distinct_dim", "points", "_coords", "_root", "_limit")

    def __init__(self, points: Iterable[PrioritizedPoint], dims: int, distinct_dim: int | None = None):
        if dims < 1:
            raise ValueError(f"A range tree needs at least one dimension, got {dims}.")
        if distinct_dim is not None and not 0 <= distinct_dim < dims:
            raise ValueError(f"distinct_dim={distinct_dim} is not one of the {dims} dimensions.")
        given = list(points)
        for p in given:
            if len(p.coords) != dims:
                raise ValueError(
                    f"Point {p.coords} has {len(p.coords)} coordinates; this tree has {dims}."
                )
        order = sorted(range(len(given)), key=lambda i: (-given[i].priority, given[i].payload, i))
        self.dims = dims
        self.distinct_dim = distinct_dim
        self.points = tuple(given[i] for i in order)
        self._coords = [p.coords for p in self.points]
        self._limit = 1 if distinct_dim is None else 3
        self._root = _Layer(self, list(range(len(self.points))), 0) if self.points else None

    def __len__(self) -> int:
        return len(self.points)

    def _merge(self, a: list[int], b: list[int]) -> list[int]:
        merged = sorted(a + b)
        if self.distinct_dim is None:
            return merged[:1]
        out: list[int] = []
        seen: set[int] = set()
        for i in merged:
            c = self._coords[i][self.distinct_dim]
            if c not in seen:
                seen.add(c)
                out.append(i)
                if len(out) == self._limit:
                    break
        return out

    def _first_allowed(self, ranks: list[int], forbidden: frozenset[int]) -> int | None:
        for i in ranks:
            if not forbidden or self._coords[i][self.distinct_dim] not in forbidden:  # type: ignore[index]
                return i
        return None

    def _inside(self, i: int, box: Sequence[Interval], start: int, forbidden: frozenset[int]) -> bool:
        c = self._coords[i]
        if forbidden and c[self.distinct_dim] in forbidden:  # type: ignore[index]
            return False
        return all(box[d][0] <= c[d] <= box[d][1] for d in range(start, self.dims))

    def best(self, box: Sequence[Interval], forbidden: Iterable[int] = ()) -> PrioritizedPoint | None:
        if len(box) != self.dims:
            raise ValueError(f"Box has {len(box)} intervals; this tree has {self.dims} dimensions.")
        forbidden = frozenset(forbidden)
        if forbidden and self.distinct_dim is None:
            raise ValueError("Excluding coordinates needs a tree built with distinct_dim.")
        if self._root is None:
            return None
        found = self._root.query(self, box, 0, forbidden)
        return None if found is None else self.points[found]


def build_range_tree(
    points: Iterable[PrioritizedPoint], dims: int, distinct_dim: int | None = None
) -> RangeTree:
    return RangeTree(points, dims, distinct_dim)


def query_max(t: RangeTree, box: Sequence[Interval]) -> PrioritizedPoint | None:
    """Highest-priority point inside the closed box, or None."""
    return t.best(box)


def query_max_excluding(
    t: RangeTree, box: Sequence[Interval], dim: int, forbidden: Iterable[int]
) -> PrioritizedPoint | None:
    """Highest-priority point in the box whose `dim` coordinate avoids `forbidden`.

    The tree must have been built with `distinct_dim=dim`; at most two values
    can be excluded.
    """
    forbidden = frozenset(forbidden)
    if t.distinct_dim != dim:
        raise ValueError(
            f"Tree keeps distinct witnesses for dimension {t.distinct_dim}, not {dim}; "
            f"build it with distinct_dim={dim}."
        )
    if len(forbidden) > 2:
        raise ValueError(f"At most two excluded values are supported, got {sorted(forbidden)}.")
    return t.best(box, forbidden)


# ------------------------------------------------------------------------------
# Pair queries
# ------------------------------------------------------------------------------


class _YNode:
    """Points of one x-node falling in one y-node."""

    __slots__ = ("p_by_z", "top_q", "witness_keys", "witness_size", "witness")

    def __init__(self, ps: "PairStructure", p_ids: list[int], q_ids: list[int]):
        P, Q = ps.P, ps.Q
        self.p_by_z = RangeTree(
            (PrioritizedPoint((P[i][2],), -P[i][0], i) for i in p_ids), 1
        )
        self.top_q = max(q_ids, key=lambda j: (Q[j][0], -j), default=None)
        # for each p, a q of this node above it in both x and y
        dominating: dict[int, int] = {}
        events = sorted(
            [(P[i][0], 0, i) for i in p_ids] + [(Q[j][0], 1, j) for j in q_ids],
            key=lambda e: (-e[0], e[1]),
        )
        best_q: int | None = None
        for _, kind, idx in events:
            if kind == 1:
                if best_q is None or Q[idx][1] > Q[best_q][1]:
                    best_q = idx
            elif best_q is not None and Q[best_q][1] > P[idx][1]:
                dominating[idx] = best_q
        order = sorted(p_ids, key=lambda i: (P[i][2], i))
        self.witness_keys = [P[i][2] for i in order]
        self.witness_size = size = _pow2(len(order))
        self.witness: list[tuple[int, int] | None] = [None] * (2 * size)
        for pos, i in enumerate(order):
            if i in dominating:
                self.witness[size + pos] = (i, dominating[i])
        for j in range(size - 1, 0, -1):
            self.witness[j] = self.witness[2 * j] or self.witness[2 * j + 1]

    def witness_in(self, rz: Interval) -> tuple[int, int] | None:
        lo, hi = _slice(self.witness_keys, rz)
        for j in _cover(self.witness_size, lo, hi):
            if self.witness[j] is not None:
                return self.witness[j]
        return None


class _XNode:
    __slots__ = ("p_by_yz", "q_by_y", "y_keys", "y_size", "y_nodes")

    def __init__(self, ps: "PairStructure", p_ids: list[int], q_ids: list[int]):
        P, Q = ps.P, ps.Q
        self.p_by_yz = RangeTree(
            (PrioritizedPoint((P[i][1], P[i][2]), -P[i][1], i) for i in p_ids), 2
        )
        self.q_by_y = RangeTree((PrioritizedPoint((Q[j][1],), Q[j][1], j) for j in q_ids), 1)
        # among equal y, Q sorts before P so that node order implies strict order
        items = sorted(
            [(Q[j][1], 0, j) for j in q_ids] + [(P[i][1], 1, i) for i in p_ids]
        )
        self.y_keys = [y for y, _, _ in items]
        self.y_size = size = _pow2(len(items))
        members: list[tuple[list[int], list[int]]] = [([], []) for _ in range(2 * size)]
        for pos, (_, kind, idx) in enumerate(items):
            members[size + pos] = ([idx], []) if kind == 1 else ([], [idx])
        for j in range(size - 1, 0, -1):
            a, b = members[2 * j], members[2 * j + 1]
            members[j] = (a[0] + b[0], a[1] + b[1])
        self.y_nodes = [
            _YNode(ps, pm, qm) if pm or qm else None for pm, qm in members
        ]


class PairStructure:
    """Pair queries between a 3-d point set `P` and a 2-d point set `Q`.

    Both sets share one x-tree; every x-node carries a y-tree over its points
    from both sets, and every y-node precomputes, along a z-tree of its
    P-points, a pair (p, q) of its own points with p below q in x and y.
    """

    __slots__ = ("P", "Q", "x_keys", "x_size", "x_nodes", "p_tree", "q_tree")

    def __init__(self, P: Sequence[tuple[int, int, int]], Q: Sequence[tuple[int, int]]):
        self.P = [tuple(p) for p in P]
        self.Q = [tuple(q) for q in Q]
        for p in self.P:
            if len(p) != 3:
                raise ValueError(f"P holds 3-d points, got {p}.")
        for q in self.Q:
            if len(q) != 2:
                raise ValueError(f"Q holds 2-d points, got {q}.")
        self.p_tree = RangeTree(
            (PrioritizedPoint(p, -p[0], i) for i, p in enumerate(self.P)), 3
        )
        self.q_tree = RangeTree(
            (PrioritizedPoint(q, q[0], j) for j, q in enumerate(self.Q)), 2
        )
        items = sorted(
            [(q[0], 0, j) for j, q in enumerate(self.Q)]
            + [(p[0], 1, i) for i, p in enumerate(self.P)]
        )
        self.x_keys = [x for x, _, _ in items]
        self.x_size = size = _pow2(len(items))
        members: list[tuple[list[int], list[int]]] = [([], []) for _ in range(2 * size)]
        for pos, (_, kind, idx) in enumerate(items):
            members[size + pos] = ([idx], []) if kind == 1 else ([], [idx])
        for j in range(size - 1, 0, -1):
            a, b = members[2 * j], members[2 * j + 1]
            members[j] = (a[0] + b[0], a[1] + b[1])
        self.x_nodes = [_XNode(self, pm, qm) if pm or qm else None for pm, qm in members]
        logger.debug("pair structure over %d + %d points", len(self.P), len(self.Q))

    def disjoint(self, rx: Interval, ryp: Interval, ryq: Interval, rz: Interval) -> tuple[int, int] | None:
        p = self.p_tree.best((rx, ryp, rz))
        q = self.q_tree.best((rx, ryq))
        if p is None or q is None or not p.coords[0] < q.coords[0]:
            return None
        return p.payload, q.payload

    def nested(self, rx: Interval, ry: Interval, rz: Interval) -> tuple[int, int] | None:
        lo, hi = _slice(self.x_keys, rx)
        nodes = [self.x_nodes[u] for u in _cover(self.x_size, lo, hi)]
        nodes = [u for u in nodes if u is not None]
        # p and q in different x-nodes: compare lowest p_y against highest q_y
        lowest: tuple[int, int] | None = None
        for u in nodes:
            if lowest is not None and (q := u.q_by_y.best((ry,))) is not None:
                if lowest[0] < q.coords[0]:
                    return lowest[1], q.payload
            if (p := u.p_by_yz.best((ry, rz))) is not None:
                if lowest is None or p.coords[0] < lowest[0]:
                    lowest = (p.coords[0], p.payload)
        for u in nodes:
            if (found := self._within(u, ry, rz)) is not None:
                return found
        return None

    def _within(self, u: _XNode, ry: Interval, rz: Interval) -> tuple[int, int] | None:
        lo, hi = _slice(u.y_keys, ry)
        ys = [u.y_nodes[v] for v in _cover(u.y_size, lo, hi)]
        ys = [v for v in ys if v is not None]
        # different y-nodes: compare lowest p_x against highest q_x
        lowest: tuple[int, int] | None = None
        for v in ys:
            if lowest is not None and v.top_q is not None and lowest[0] < self.Q[v.top_q][0]:
                return lowest[1], v.top_q
            if (p := v.p_by_z.best((rz,))) is not None:
                px = -p.priority
                if lowest is None or px < lowest[0]:
                    lowest = (px, p.payload)
        for v in ys:
            if (w := v.witness_in(rz)) is not None:
                return w
        return None


def build_pair_structure(P: Sequence[tuple[int, int, int]], Q: Sequence[tuple[int, int]]) -> PairStructure:
    return PairStructure(P, Q)


def pair_query_disjoint(
    ps: PairStructure, rx: Interval, ryp: Interval, ryq: Interval, rz: Interval
) -> tuple[int, int] | None:
    """Indices (i, j) of some p = P[i] in rx x ryp x rz and q = Q[j] in rx x ryq
    with p_x < q_x, or None."""
    return ps.disjoint(rx, ryp, ryq, rz)


def pair_query_nested(
    ps: PairStructure, rx: Interval, ry: Interval, rz: Interval
) -> tuple[int, int] | None:
    """Indices (i, j) of some p = P[i] in rx x ry x rz and q = Q[j] in rx x ry
    with p_x < q_x and p_y < q_y, or None."""
    return ps.nested(rx, ry, rz)
