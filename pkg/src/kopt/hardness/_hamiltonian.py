"""Exhaustive minimum-weight Hamiltonian cycle search for small sparse graphs.

The search decides edges in or out of the cycle. After every decision the
consequences are propagated until nothing changes:

* a vertex with exactly as many undecided edges as it still needs takes them all;
* a vertex holding two chosen edges drops its undecided ones;
* an edge joining the two ends of a chosen path is dropped unless it would
  close the full cycle.

Branching happens only when propagation stalls, at a path end with the fewest
undecided edges. Every change is kept on a trail so a branch is undone in time
proportional to what it decided.
"""

import logging

from .._config import Settings, resolve
from .._errors import BudgetExceededError
from ..instance import TourInstance, pair

logger = logging.getLogger(__name__)

_OPEN, _IN, _OUT = 0, 1, -1


class _DeadEnd(Exception):
    pass


class _Search:
    def __init__(self, inst: TourInstance, bound: int | None, budget: int):
        self.n = inst.n
        self.bound = bound
        self.budget = budget
        self.ends = [(u, v) for u, v, _ in inst.edges]
        self.weights = [w for _, _, w in inst.edges]
        self.edge_id = {pair(u, v): e for e, (u, v) in enumerate(self.ends)}
        self.incident: list[list[int]] = [[] for _ in range(self.n)]
        for e, (u, v) in enumerate(self.ends):
            self.incident[u].append(e)
            self.incident[v].append(e)
        self.lightest = min(self.weights, default=0)

        self.state = [_OPEN] * len(self.ends)
        self.chosen = [0] * self.n
        self.open = [len(edges) for edges in self.incident]
        # for the end of a chosen path, the other end; isolated vertices map to themselves
        self.partner = list(range(self.n))
        self.count = 0
        self.weight = 0
        self.trail: list[tuple[int, int, int]] = []

        self.best: int | None = None
        self.nodes = 0

    def done(self) -> bool:
        return self.best is not None and self.bound is not None and self.best <= self.bound

    def run(self) -> None:
        try:
            self._propagate(list(range(self.n)))
        except _DeadEnd:
            return
        self._branch()

    def _decide(self, e: int, value: int, queue: list[int]) -> None:
        u, v = self.ends[e]
        self.state[e] = value
        self.open[u] -= 1
        self.open[v] -= 1
        queue += (u, v)
        if value == _OUT:
            self.trail.append((e, -1, -1))
            return

        self.chosen[u] += 1
        self.chosen[v] += 1
        self.count += 1
        self.weight += self.weights[e]
        a, b = self.partner[u], self.partner[v]
        broken = self.chosen[u] > 2 or self.chosen[v] > 2
        if broken or a == v:
            self.trail.append((e, -1, -1))
            if broken or self.count < self.n:
                raise _DeadEnd
            return
        self.trail.append((e, a, b))
        self.partner[a], self.partner[b] = b, a
        if self.count < self.n - 1:
            closing = self.edge_id.get(pair(a, b))
            if closing is not None and self.state[closing] == _OPEN:
                self._decide(closing, _OUT, queue)

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            e, a, b = self.trail.pop()
            u, v = self.ends[e]
            self.open[u] += 1
            self.open[v] += 1
            if self.state[e] == _IN:
                self.chosen[u] -= 1
                self.chosen[v] -= 1
                self.count -= 1
                self.weight -= self.weights[e]
                if a >= 0:
                    self.partner[a], self.partner[b] = u, v
            self.state[e] = _OPEN

    def _propagate(self, queue: list[int]) -> None:
        while queue:
            v = queue.pop()
            need = 2 - self.chosen[v]
            if self.open[v] < need:
                raise _DeadEnd
            if self.open[v] == 0 or 0 < need < self.open[v]:
                continue
            value = _OUT if need == 0 else _IN
            for e in self.incident[v]:
                if self.state[e] == _OPEN:
                    self._decide(e, value, queue)

    def _branch(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceededError(
                f"Hamiltonian cycle search visited more than {self.budget} nodes on a "
                f"{self.n}-vertex graph; raise hamiltonian_budget or search a smaller "
                f"instance."
            )
        if self.count == self.n:
            if self.best is None or self.weight < self.best:
                self.best = self.weight
            return
        if self.best is not None and self.weight + (self.n - self.count) * self.lightest >= self.best:
            return

        v = min(
            (u for u in range(self.n) if self.chosen[u] < 2),
            key=lambda u: (self.chosen[u] != 1, self.open[u], u),
        )
        options = [e for e in self.incident[v] if self.state[e] == _OPEN]
        for i, e in enumerate(options):
            mark = len(self.trail)
            queue: list[int] = []
            try:
                # earlier options were covered by their own branches
                for f in options[:i]:
                    self._decide(f, _OUT, queue)
                self._decide(e, _IN, queue)
                self._propagate(queue)
                self._branch()
            except _DeadEnd:
                pass
            finally:
                self._undo(mark)
            if self.done():
                return


def min_hamiltonian_cycle_weight(
    inst: TourInstance,
    bound: int | None = None,
    *,
    settings: Settings | None = None,
) -> int | None:
    """Weight of the lightest Hamiltonian cycle of the graph, or None.

    The tour of `inst` is ignored. With `bound` set, the search stops as soon
    as it meets a cycle of weight at most `bound`.

    Raises
    ------
    BudgetExceededError
        If more than `settings.hamiltonian_budget` search nodes are visited.
    """
    settings = resolve(settings)
    search = _Search(inst, bound, settings.hamiltonian_budget)
    search.run()
    logger.debug("hamiltonian search: %d nodes, best %s", search.nodes, search.best)
    return search.best
