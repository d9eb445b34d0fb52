"""Exception hierarchy.

Every error carries the offending object or a witness so callers (and the
CLI) can report *why* something was rejected, not just that it was.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any


class OpcorrError(Exception):
    """Base class for all library errors."""


class ValidationError(OpcorrError, ValueError):
    """An input violates a structural or probabilistic invariant."""


class UnknownPoint(ValidationError, KeyError):
    def __init__(self, point: Any, space_id: str):
        self.point = point
        self.space_id = space_id
        super().__init__(f"point {point!r} is not in space {space_id!r}")

    # KeyError.__str__ would repr() the whole message
    def __str__(self) -> str:
        return self.args[0]


class NegativeWeight(ValidationError):
    def __init__(self, point: Any, weight: Fraction):
        self.point = point
        self.weight = weight
        super().__init__(f"negative weight {weight} at point {point!r}")


class NotNormalized(ValidationError):
    def __init__(self, total: Fraction, label: str | None = None):
        self.total = total
        self.label = label
        where = f"{label}: " if label else ""
        super().__init__(f"{where}weights sum to {total}, expected 1")


class WeightsNotConvex(ValidationError):
    def __init__(self, coefficients: list[Fraction]):
        self.coefficients = coefficients
        shown = ", ".join(str(c) for c in coefficients)
        super().__init__(f"mixing coefficients [{shown}] are not a convex combination")


class SpaceMismatch(ValidationError):
    def __init__(self, expected: Any, actual: Any, context: str = ""):
        self.expected = expected
        self.actual = actual
        msg = f"space mismatch: expected {expected!r}, got {actual!r}"
        super().__init__(f"{context}: {msg}" if context else msg)


class NotProductSpace(ValidationError):
    def __init__(self, space_id: str):
        self.space_id = space_id
        super().__init__(f"space {space_id!r} is not a declared product space")


class NotAbsolutelyContinuous(ValidationError):
    """Raised when a density is requested but the numerator charges a null point."""

    def __init__(self, witness: Any, numerator_weight: Fraction):
        self.witness = witness
        self.numerator_weight = numerator_weight
        super().__init__(
            f"not absolutely continuous: numerator has weight {numerator_weight} "
            f"at {witness!r} where the denominator vanishes"
        )


class MarginalMismatch(ValidationError):
    def __init__(self, omega: Any, index: int, expected: Any, actual: Any):
        self.omega = omega
        self.index = index
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"row at {omega!r}: marginal {index} is {actual}, expected {expected}"
        )


class EnumerationBoundExceeded(OpcorrError):
    def __init__(self, cells: int, bound: int):
        self.cells = cells
        self.bound = bound
        super().__init__(
            f"vertex enumeration over {cells} cells exceeds the bound of {bound} "
            "(set OPCORR_ENUM_BOUND to raise it)"
        )


class OddEnsembleSize(OpcorrError, ValueError):
    def __init__(self, n: int):
        self.n = n
        super().__init__(f"alternating measurement needs an even ensemble size, got {n}")


class UndefinedCoefficient(OpcorrError, ArithmeticError):
    def __init__(self, which: int):
        self.which = which
        super().__init__(f"correlation coefficient undefined: variance {which} is zero")


class UndefinedDensity(OpcorrError, KeyError):
    """Density queried outside its domain (the support of its reference measure)."""

    def __init__(self, point: Any):
        self.point = point
        super().__init__(f"density is undefined at {point!r}")

    def __str__(self) -> str:
        return self.args[0]


class ParseError(OpcorrError):
    def __init__(self, message: str, line: int = 0, column: int = 0, path: str = ""):
        self.line = line
        self.column = column
        self.path = path
        loc = f"{path}:{line}:{column}" if path else f"line {line}, column {column}"
        super().__init__(f"{loc}: {message}")


class SystemValidationError(ValidationError):
    """A system file parsed but one of its objects is invalid."""

    def __init__(self, obj: str, cause: Exception | str):
        self.obj = obj
        self.cause = cause
        super().__init__(f"{obj}: {cause}")
