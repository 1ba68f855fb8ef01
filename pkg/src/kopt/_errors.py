from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .instance import Move
    from .patterns import ConnectionPattern


class KoptRuntimeError(RuntimeError):
    pass


class InstanceFormatError(KoptRuntimeError):
    """Raised when an instance file does not follow the line grammar."""

    def __init__(self, message: str, line: int, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class InvalidInstanceError(KoptRuntimeError):
    """Raised when a well-formed instance breaks a structural rule."""


class InvalidSwapError(KoptRuntimeError):
    """Raised when a swap does not describe an exchange of tour edges."""


class StaleMoveError(KoptRuntimeError):
    """Raised when a move is applied to a tour it was not found on."""


class PatternError(KoptRuntimeError):
    """Raised for malformed connection patterns or slot sets."""

    def __init__(self, message: str, pattern: "ConnectionPattern | None" = None):
        self.pattern = pattern
        super().__init__(message)


class NotAdmissibleError(PatternError):
    """Raised when an embedding asks for an edge the graph does not have."""


class NotSequentialError(PatternError):
    """Raised when a swap is not a single alternating closed walk."""


class BudgetExceededError(KoptRuntimeError):
    """Raised when an exhaustive search would exceed its configured budget."""


class DecompositionSizeError(KoptRuntimeError):
    """Raised when an exact width computation is asked for a graph that is too large."""


class PreconditionViolationError(KoptRuntimeError):
    """Raised when a smaller improving move exists.

    The quasi-linear engines are only exact when no improving move with fewer
    removed edges exists. When they stumble over one, it is attached as
    `move` so that the caller can apply it and retry.
    """

    def __init__(self, message: str, move: "Move"):
        self.move = move
        super().__init__(message)


class WeightBoundError(KoptRuntimeError):
    """Raised when edge weights fall outside the bound an engine was promised."""


class ReductionError(KoptRuntimeError):
    """Raised when a reduction receives an input it cannot encode."""
