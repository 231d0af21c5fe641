"""Exception hierarchy shared by every stratcx module.

The CLI maps any ``StratcxError`` to exit code 2 (mathematical precondition
failure); the HTTP surface maps it to 422.
"""

from __future__ import annotations


class StratcxError(Exception):
    """Base class for all domain errors."""


class ShapeError(StratcxError, ValueError):
    """Lengths or matrix shapes do not match."""


class AdmissibilityError(StratcxError):
    """A rank vector violates r_{i+1} + r_i <= d_i for some i."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class FeasibilityError(StratcxError):
    """A homology vector is not realized by any complex."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class ExactnessHypothesisError(StratcxError):
    """chi_j(d) < 0 for some 1 <= j < n, or chi_n(d) != 0."""

    def __init__(self, message: str, index: int, value: int):
        super().__init__(message)
        self.index = index
        self.value = value


class NotAComplexError(StratcxError):
    """Some consecutive product M_{i+1} M_i is nonzero."""

    def __init__(self, message: str, stage: int):
        super().__init__(message)
        self.stage = stage


class GroupElementError(StratcxError):
    """A block of a group element is not invertible."""


class WitnessError(StratcxError):
    """Random witness sampling ran out of retries."""


class FormError(StratcxError):
    """Malformed or incompatible differential forms."""


class DegenerateTwistError(FormError):
    """The star product is undefined when d_1 + d_2 = 0."""


class IntegrabilityError(StratcxError):
    """The operation needs an integrable 1-form."""


class ConsistencyError(StratcxError):
    """Two independent computations of the same quantity disagree."""
