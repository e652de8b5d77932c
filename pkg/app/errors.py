# app/errors.py

from typing import Any, Optional


class TestSpaceError(ValueError):
    """Base class for every error raised by the library."""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class CapExceeded(TestSpaceError):
    def __init__(self, what: str, cap: int):
        super().__init__(f"{what} exceeds the cap of {cap}")
        self.cap = cap


class EmptySet(TestSpaceError):
    pass


class NotASubgroup(TestSpaceError):
    pass


class NotWellDefined(TestSpaceError):
    pass


class NotInjective(TestSpaceError):
    pass


class ActionUndefined(TestSpaceError):
    pass


class TestSumViolated(TestSpaceError):
    pass


class RangeViolated(TestSpaceError):
    pass


class NotAlgebraic(TestSpaceError):
    pass


class MorphismMismatch(TestSpaceError):
    pass


class DimensionMismatch(TestSpaceError):
    pass


class Condition1Violated(TestSpaceError):
    pass


class NotTransitive(TestSpaceError):
    pass


class SeedNotAState(TestSpaceError):
    pass


class NotRegular(TestSpaceError):
    pass


class WitnessNotFound(TestSpaceError):
    pass


class IllDefined(TestSpaceError):
    pass


class EmptyPolytope(TestSpaceError):
    pass
