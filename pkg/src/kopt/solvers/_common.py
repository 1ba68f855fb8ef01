from concurrent.futures import ThreadPoolExecutor
import logging
from typing import Callable, Iterable, Mapping, TypeVar

from .._errors import KoptRuntimeError
from ..instance import Infeasible, Move, TourInstance, best, validate_swap
from ..patterns import ConnectionPattern, component_slots, realize, sequential_decomposition
from ..seqswaps import SequentialIndex

logger = logging.getLogger(__name__)

T = TypeVar("T")

Placement = tuple[tuple[int, ...], int]


def placements(
    index: SequentialIndex, p: ConnectionPattern, slots: tuple[int, ...]
) -> list[Placement]:
    """(tour edges on `slots`, gain) for every admissible placement of one component."""
    sub = sequential_decomposition(p)
    for component in sub:
        if component.slots == slots:
            return index.embeddings(component.pattern)
    raise KoptRuntimeError(f"{slots} is not a sequential component of {p}.")


def finish(inst: TourInstance, p: ConnectionPattern, assignment: Mapping[int, int]) -> Move:
    """Realize and validate the move a solver settled on."""
    edges = tuple(assignment[s] for s in range(p.k))
    result = validate_swap(inst, realize(p, edges, inst))
    if isinstance(result, Infeasible):
        raise KoptRuntimeError(
            f"Pattern {p} at tour edges {list(edges)} was expected to be a move but "
            f"leaves {result.cycles} cycles. This is a bug in kopt."
        )
    return result


def run_patterns(
    work: Callable[[ConnectionPattern], T],
    patterns: Iterable[ConnectionPattern],
    threads: int,
) -> list[T]:
    """Apply `work` to every pattern, on a thread pool when `threads` > 1."""
    if threads <= 1:
        return [work(p) for p in patterns]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, patterns))


def best_improving(moves: Iterable[Move | None]) -> Move | None:
    return best(m for m in moves if m is not None and m.gain > 0)
