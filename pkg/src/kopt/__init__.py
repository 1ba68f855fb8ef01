"""Finding improving k-opt moves for tours on bounded-degree graphs.

An instance is a weighted graph of maximum degree `d` together with a
Hamiltonian cycle of it, the tour. A k-move removes `k` tour edges, adds `k`
graph edges and must leave a single Hamiltonian cycle behind; it improves the
tour when the removed weight exceeds the added weight.

The exact engines live in `kopt.solvers`, the pattern machinery they are built
on in `kopt.patterns`, `kopt.seqswaps` and `kopt.rangesearch`, and the
hardness reductions in `kopt.hardness`.
"""

from . import hardness, solvers, viz
from ._config import Settings, using
from ._errors import (
    BudgetExceededError,
    DecompositionSizeError,
    InstanceFormatError,
    InvalidInstanceError,
    InvalidSwapError,
    KoptRuntimeError,
    NotAdmissibleError,
    NotSequentialError,
    PatternError,
    PreconditionViolationError,
    ReductionError,
    StaleMoveError,
    WeightBoundError,
)
from ._log import configure_logging
from .instance import (
    Infeasible,
    Move,
    Swap,
    TourInstance,
    apply_move,
    count_cycles,
    move_to_json,
    parse_instance,
    random_instance,
    serialize_instance,
    tour_weight,
    validate_swap,
)
from .patterns import (
    ConnectionPattern,
    PatternUniverse,
    SubPattern,
    enumerate_patterns,
    feasible_patterns,
    is_feasible,
    sequential_decomposition,
)
from .solvers import (
    Engine,
    MoveTrace,
    Strategy,
    best_move_c_sequential,
    best_move_meet,
    best_move_pathwidth_dp,
    brute_force_best_move,
    detect_k8_bounded,
    detect_quasilinear,
    local_search,
)

__all__ = (
    "apply_move",
    "best_move_c_sequential",
    "best_move_meet",
    "best_move_pathwidth_dp",
    "brute_force_best_move",
    "BudgetExceededError",
    "configure_logging",
    "ConnectionPattern",
    "count_cycles",
    "DecompositionSizeError",
    "detect_k8_bounded",
    "detect_quasilinear",
    "Engine",
    "enumerate_patterns",
    "feasible_patterns",
    "hardness",
    "Infeasible",
    "InstanceFormatError",
    "InvalidInstanceError",
    "InvalidSwapError",
    "is_feasible",
    "KoptRuntimeError",
    "local_search",
    "Move",
    "move_to_json",
    "MoveTrace",
    "NotAdmissibleError",
    "NotSequentialError",
    "parse_instance",
    "PatternError",
    "PatternUniverse",
    "PreconditionViolationError",
    "random_instance",
    "ReductionError",
    "sequential_decomposition",
    "serialize_instance",
    "Settings",
    "solvers",
    "StaleMoveError",
    "Strategy",
    "SubPattern",
    "Swap",
    "TourInstance",
    "tour_weight",
    "using",
    "validate_swap",
    "viz",
    "WeightBoundError",
)
