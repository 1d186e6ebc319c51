from __future__ import annotations

from typing import Any, Optional


class NsconicError(Exception):
    """Root of every error raised by the package."""


class NotPositiveDefinite(NsconicError):
    pass


class SingularSystem(NsconicError):
    pass


class NegativeQuadratic(NsconicError):
    pass


class DimensionMismatch(NsconicError):
    pass


class NotInterior(NsconicError):
    pass


class NotInteriorDual(NsconicError):
    pass


class NoConvergence(NsconicError):
    pass


class OutOfAnalysisRegion(NsconicError):
    pass


class DegenerateDenominator(NsconicError):
    pass


class StepLeftCone(NsconicError):
    pass


class ConfigError(NsconicError):
    pass


class UnknownConeType(NsconicError):
    pass


class ParseError(NsconicError):
    def __init__(self, message: str, *, path: Optional[str] = None, field: Optional[str] = None) -> None:
        self.path = path
        self.field = field
        where = ":".join(p for p in (path, field) if p)
        super().__init__(f"{where}: {message}" if where else message)


class MaxIterationsExceeded(NsconicError):
    """Iteration cap reached; `result` holds the partial solve."""

    def __init__(self, message: str, result: Any = None) -> None:
        super().__init__(message)
        self.result = result
