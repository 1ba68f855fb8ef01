"""Exact path and tree decompositions of small graphs.

Interaction graphs have at most one vertex per sequential component, so exact
subset dynamic programs are affordable here.
"""

from dataclasses import dataclass
from enum import Enum
import functools
from typing import Hashable, Sequence

import networkx as nx

from ._errors import DecompositionSizeError

MAX_VERTICES = 16


class NodeKind(str, Enum):
    LEAF = "leaf"
    INTRODUCE = "introduce"
    FORGET = "forget"
    JOIN = "join"


@dataclass(frozen=True, slots=True)
class NiceNode:
    """One node of a nice decomposition; `children` index earlier nodes."""

    kind: NodeKind
    bag: frozenset[Hashable]
    vertex: Hashable | None = None
    children: tuple[int, ...] = ()


def _nice(
    bags: Sequence[frozenset[Hashable]], children: Sequence[Sequence[int]], root: int
) -> list[NiceNode]:
    nodes: list[NiceNode] = []

    def add(node: NiceNode) -> int:
        nodes.append(node)
        return len(nodes) - 1

    def transition(idx: int, src: frozenset, dst: frozenset) -> int:
        bag = src
        for v in sorted(src - dst, key=repr):
            bag = bag - {v}
            idx = add(NiceNode(NodeKind.FORGET, bag, v, (idx,)))
        for v in sorted(dst - src, key=repr):
            bag = bag | {v}
            idx = add(NiceNode(NodeKind.INTRODUCE, bag, v, (idx,)))
        return idx

    def build(t: int) -> int:
        subtrees = [transition(build(c), bags[c], bags[t]) for c in children[t]]
        if not subtrees:
            return transition(add(NiceNode(NodeKind.LEAF, frozenset())), frozenset(), bags[t])
        idx = subtrees[0]
        for other in subtrees[1:]:
            idx = add(NiceNode(NodeKind.JOIN, bags[t], None, (idx, other)))
        return idx

    transition(build(root), bags[root], frozenset())
    return nodes


def nice_decomposition(bags: Sequence[frozenset[Hashable]]) -> list[NiceNode]:
    """Leaf/introduce/forget sequence of a path decomposition, ending in an
    empty root bag."""
    if not bags:
        return [NiceNode(NodeKind.LEAF, frozenset())]
    children = [[i - 1] if i else [] for i in range(len(bags))]
    return _nice(bags, children, len(bags) - 1)


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple[frozenset[Hashable], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=1) - 1

    @functools.cached_property
    def nice_form(self) -> list[NiceNode]:
        return nice_decomposition(self.bags)


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags plus a parent pointer per bag; exactly one bag has no parent."""

    bags: tuple[frozenset[Hashable], ...]
    parent: tuple[int | None, ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=1) - 1

    @functools.cached_property
    def nice_form(self) -> list[NiceNode]:
        return nice_tree_decomposition(self)


def nice_tree_decomposition(td: TreeDecomposition) -> list[NiceNode]:
    if not td.bags:
        return [NiceNode(NodeKind.LEAF, frozenset())]
    children: list[list[int]] = [[] for _ in td.bags]
    root = 0
    for t, p in enumerate(td.parent):
        if p is None:
            root = t
        else:
            children[p].append(t)
    return _nice(td.bags, children, root)


def _check_size(g: nx.Graph) -> list[Hashable]:
    if g.number_of_nodes() > MAX_VERTICES:
        raise DecompositionSizeError(
            f"Exact decompositions are limited to {MAX_VERTICES} vertices; this "
            f"graph has {g.number_of_nodes()}."
        )
    return sorted(g.nodes, key=repr)


def _neighbour_masks(g: nx.Graph, vertices: list[Hashable]) -> list[int]:
    index = {v: i for i, v in enumerate(vertices)}
    masks = [0] * len(vertices)
    for u, v in g.edges:
        if u != v:
            masks[index[u]] |= 1 << index[v]
            masks[index[v]] |= 1 << index[u]
    return masks


def exact_pathwidth(g: nx.Graph) -> tuple[int, PathDecomposition]:
    """Pathwidth by the vertex separation subset recurrence, with a witness.

    f(S) = min over v in S of max(f(S - v), |boundary(S)|), where the boundary
    holds the vertices of S with a neighbour outside S.
    """
    vertices = _check_size(g)
    n = len(vertices)
    if n == 0:
        return 0, PathDecomposition(())
    nbr = _neighbour_masks(g, vertices)
    full = (1 << n) - 1

    def boundary(s: int) -> int:
        outside = full & ~s
        return sum(1 for i in range(n) if s >> i & 1 and nbr[i] & outside)

    best = [0] * (1 << n)
    choice = [0] * (1 << n)
    for s in range(1, 1 << n):
        here = boundary(s)
        value = n + 1
        for i in range(n):
            if s >> i & 1:
                candidate = max(best[s & ~(1 << i)], here)
                if candidate < value:
                    value, choice[s] = candidate, i
        best[s] = value

    order = []
    s = full
    while s:
        order.append(choice[s])
        s &= ~(1 << choice[s])
    order.reverse()

    bags = []
    prefix = 0
    for i in order:
        outside = full & ~prefix
        active = {vertices[j] for j in range(n) if prefix >> j & 1 and nbr[j] & outside}
        bags.append(frozenset(active | {vertices[i]}))
        prefix |= 1 << i
    decomposition = PathDecomposition(tuple(bags))
    return decomposition.width, decomposition


def exact_treewidth(g: nx.Graph) -> tuple[int, TreeDecomposition]:
    """Treewidth by dynamic programming over elimination orderings.

    Eliminating v after the set S costs |Q(S, v)|: the vertices outside S
    reachable from v through S.
    """
    vertices = _check_size(g)
    n = len(vertices)
    if n == 0:
        return 0, TreeDecomposition((), ())
    nbr = _neighbour_masks(g, vertices)

    @functools.cache
    def q_set(s: int, v: int) -> int:
        seen = 1 << v
        stack = [v]
        found = 0
        while stack:
            u = stack.pop()
            todo = nbr[u] & ~seen
            seen |= todo
            for w in range(n):
                if todo >> w & 1:
                    if s >> w & 1:
                        stack.append(w)
                    else:
                        found |= 1 << w
        return found

    best = [0] * (1 << n)
    choice = [0] * (1 << n)
    best[0] = -1
    for s in range(1, 1 << n):
        value = n + 1
        for v in range(n):
            if s >> v & 1:
                rest = s & ~(1 << v)
                candidate = max(best[rest], q_set(rest, v).bit_count())
                if candidate < value:
                    value, choice[s] = candidate, v
        best[s] = value

    order = []
    s = (1 << n) - 1
    while s:
        order.append(choice[s])
        s &= ~(1 << choice[s])
    order.reverse()

    rank = {v: i for i, v in enumerate(order)}
    bags = []
    parent: list[int | None] = []
    eliminated = 0
    for v in order:
        later = q_set(eliminated, v)
        bags.append(frozenset({vertices[v]} | {vertices[w] for w in range(n) if later >> w & 1}))
        parent.append(min((rank[w] for w in range(n) if later >> w & 1), default=None))
        eliminated |= 1 << v
    # components end in their own root; hang them under the last bag
    last = len(order) - 1
    parent = [p if p is not None or t == last else last for t, p in enumerate(parent)]
    decomposition = TreeDecomposition(tuple(bags), tuple(parent))
    return decomposition.width, decomposition
