"""
Error Types
One hierarchy for every failure the analyzer can report
"""
from typing import Optional


class GrowthError(Exception):
    """Base class for all analyzer errors"""


class AllCoefficientsZero(GrowthError):
    """Every P_j of the equation is identically zero"""


class SegmentOutOfRange(GrowthError):
    """A segment index outside 1..p-1 was requested"""


class InconsistentConstraints(GrowthError):
    """The given initial values violate the prefix relations of the recurrence"""


class PrecisionTooLow(GrowthError):
    def __init__(self, message: str, suggested_bits: Optional[int] = None):
        super().__init__(message)
        self.suggested_bits = suggested_bits


class NotDecaying(GrowthError):
    """|a_n| does not stay below 1 over the estimation window"""


class TruncationNotReached(GrowthError):
    def __init__(self, message: str, required_terms: Optional[int] = None):
        super().__init__(message)
        self.required_terms = required_terms


class InvalidLambda(GrowthError):
    """Requested order is not a rational number in (0, 1)"""


class InvalidSigma(GrowthError):
    """Requested type is not a positive rational number"""


class EquationFormatError(GrowthError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")
        self.line = line
        self.column = column


class InvariantViolation(GrowthError):
    """Hull mismatch, residual breach or another internal consistency failure"""
