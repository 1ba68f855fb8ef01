from ._dp import best_move_pathwidth_dp
from ._k8 import detect_k8_bounded
from ._local import Engine, MoveTrace, Strategy, TraceStep, local_search
from ._meet import best_move_c_sequential, best_move_meet
from ._oracle import brute_force_best_move
from ._quasi import QUASI_MAX_K, detect_quasilinear

__all__ = (
    "QUASI_MAX_K",
    "Engine",
    "MoveTrace",
    "Strategy",
    "TraceStep",
    "best_move_c_sequential",
    "best_move_meet",
    "best_move_pathwidth_dp",
    "brute_force_best_move",
    "detect_k8_bounded",
    "detect_quasilinear",
    "local_search",
)
