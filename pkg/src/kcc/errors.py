"""Exception hierarchy shared by every kcc module."""

from __future__ import annotations


class KCCError(Exception):
    """Base class for all library errors."""


class IdNotPresent(KCCError, KeyError):
    """The point id is not part of the current point set."""


class IdAlreadyPresent(KCCError, KeyError):
    """The point id is already part of the current point set."""


class EmptySolution(KCCError, ValueError):
    pass


class TooFewPoints(KCCError, ValueError):
    pass


class OracleSizeExceeded(KCCError, ValueError):
    pass


class MetricError(KCCError, ValueError):
    """Distance data violates a metric axiom or the backend's shape rules."""


class IllegalState(KCCError, RuntimeError):
    """An engine or verifier precondition was violated."""


class UnsupportedOperation(KCCError):
    def __init__(self, message: str, step: int | None = None):
        super().__init__(message if step is None else f"step {step}: {message}")
        self.step = step


class ParseError(KCCError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
