"""Local search driver.

Moves are looked for with an ascending scan over k, restarted after every
applied move. The quasi-linear engines are only exact when no smaller
improving move exists, and the ascending scan is what guarantees that.
"""

from dataclasses import dataclass, field
from enum import Enum
import logging
from typing import Callable, Iterator

from .._config import Settings, resolve
from .._errors import BudgetExceededError, PreconditionViolationError
from ..instance import Move, TourInstance, apply_move
from ._dp import best_move_pathwidth_dp
from ._k8 import detect_k8_bounded
from ._meet import best_move_meet
from ._oracle import brute_force_best_move
from ._quasi import QUASI_MAX_K, detect_quasilinear

logger = logging.getLogger(__name__)


class Strategy(str, Enum):
    FIRST = "first"
    """Apply the best move of the smallest k with an improving move."""
    BEST = "best"
    """Apply the best move over every k up to the maximum."""


class Engine(str, Enum):
    ORACLE = "oracle"
    MEET = "meet"
    DP = "dp"
    QUASI = "quasi"


@dataclass(frozen=True, slots=True)
class TraceStep:
    k: int
    move: Move
    weight: int
    """Tour weight after the move."""


@dataclass
class MoveTrace:
    initial_weight: int
    steps: list[TraceStep] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[Move]:
        return (step.move for step in self.steps)

    @property
    def final_weight(self) -> int:
        return self.steps[-1].weight if self.steps else self.initial_weight

    @property
    def total_gain(self) -> int:
        return self.initial_weight - self.final_weight


Finder = Callable[[TourInstance, int], Move | None]


def _finder(engine: Engine, W: int | None, settings: Settings) -> Finder:
    match engine:
        case Engine.ORACLE:
            return lambda inst, k: brute_force_best_move(inst, k, settings=settings)
        case Engine.MEET:
            return lambda inst, k: best_move_meet(inst, k, settings=settings)
        case Engine.DP:
            return lambda inst, k: best_move_pathwidth_dp(inst, k, settings=settings)
        case Engine.QUASI:

            def quasi(inst: TourInstance, k: int) -> Move | None:
                if k <= QUASI_MAX_K:
                    return detect_quasilinear(inst, k, settings=settings)
                bound = W if W is not None else max(w for _, _, w in inst.edges)
                return detect_k8_bounded(inst, bound, settings=settings)

            return quasi


def local_search(
    inst: TourInstance,
    k_max: int,
    strategy: Strategy = Strategy.FIRST,
    engine: Engine = Engine.QUASI,
    *,
    W: int | None = None,
    settings: Settings | None = None,
) -> tuple[TourInstance, MoveTrace]:
    """Apply improving moves of at most `k_max` removed edges until none is left.

    Parameters
    ----------
    strategy: Strategy
        FIRST stops the scan at the smallest k with an improving move. BEST
        scans every k and needs an exact engine.
    engine: Engine
        QUASI handles k <= 8; at k = 8 it needs weights in [1, W], with W
        defaulting to the largest weight.

    Raises
    ------
    BudgetExceededError
        If more than `settings.iteration_budget` moves get applied.
    """
    settings = resolve(settings)
    strategy, engine = Strategy(strategy), Engine(engine)
    if k_max < 2:
        raise ValueError(f"k_max must be at least 2, got {k_max}.")
    if engine is Engine.QUASI:
        if k_max > QUASI_MAX_K + 1:
            raise ValueError(
                f"The quasi-linear engines stop at k=8, got k_max={k_max}. Use the dp "
                f"or meet engine for larger k."
            )
        if strategy is Strategy.BEST:
            raise ValueError(
                "Strategy BEST looks past the smallest improving k, where the quasi-linear "
                "engines lose their guarantee. Use strategy FIRST or an exact engine."
            )
    find = _finder(engine, W, settings)
    trace = MoveTrace(initial_weight=inst.total_weight)

    while True:
        found: tuple[int, Move] | None = None
        for k in range(2, min(k_max, inst.n) + 1):
            try:
                move = find(inst, k)
            except PreconditionViolationError as exc:
                logger.info("smaller improving move surfaced at k=%d; applying it", k)
                found = (exc.move.k, exc.move)
                break
            if move is None:
                continue
            if strategy is Strategy.FIRST:
                found = (k, move)
                break
            if found is None or move.sort_key() < found[1].sort_key():
                found = (k, move)
        if found is None:
            logger.info(
                "local optimum after %d moves: weight %d", len(trace), inst.total_weight
            )
            return inst, trace
        if len(trace) >= settings.iteration_budget:
            raise BudgetExceededError(
                f"Local search applied {len(trace)} moves without reaching a local "
                f"optimum; raise iteration_budget (currently "
                f"{settings.iteration_budget}) to keep going."
            )
        k, move = found
        inst = apply_move(inst, move)
        trace.steps.append(TraceStep(k, move, inst.total_weight))
        logger.debug("applied %d-move with gain %d", k, move.gain)
