"""Exception hierarchy shared by all modules."""

from __future__ import annotations

from typing import Any


class RelRootsError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(RelRootsError, ValueError):
    pass


class InvalidInput(RelRootsError, ValueError):
    pass


class TooLarge(RelRootsError):
    """An exponential-time engine was asked for an instance above its cap."""


class NotDivisible(RelRootsError, ArithmeticError):
    pass


class ContractViolation(RelRootsError, AssertionError):
    """A mathematical fact the package relies on failed to hold numerically."""


class SolverFailure(RelRootsError, RuntimeError):
    def __init__(self, message: str, partial: Any = None):
        super().__init__(message)
        self.partial = partial


class InvalidTarget(InvalidParameter):
    pass


class NTooSmall(InvalidParameter):
    """The cycle length m_n dropped below 3; the caller must increase n."""


class NotFound(RelRootsError):
    def __init__(self, message: str, best: Any = None):
        super().__init__(message)
        self.best = best


class PrecisionExhausted(RelRootsError):
    pass


class CacheCorruption(RelRootsError):
    pass
