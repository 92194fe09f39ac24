"""Exception and warning types shared across the package."""


class PhaseSpaceError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(PhaseSpaceError, ValueError):
    pass


class InconsistencyError(PhaseSpaceError, ValueError):
    """An input violates a structural invariant (orthonormality, positivity, ...)."""


class NotHermitianError(PhaseSpaceError, ValueError):
    pass


class DimensionMismatchError(PhaseSpaceError, ValueError):
    pass


class DomainError(PhaseSpaceError, ValueError):
    """Parameter outside the family of phase spaces where a formula is defined.

    ``kind`` is one of ``"singular-parameter"``, ``"out-of-family"``,
    ``"singular-dual"`` or ``"divergent-integral"``.
    """

    def __init__(self, message, kind="out-of-family"):
        super().__init__(message)
        self.kind = kind


class MeasureQualityError(PhaseSpaceError):
    """A measure realization misses its identity tolerances."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})


class BoundViolationError(PhaseSpaceError):
    """Raised when the speed bound is contradicted by the supplied data."""


class TruncationWarning(UserWarning):
    """Fock truncation too small for the requested amplitude."""


class AccuracyWarning(UserWarning):
    """Quadrature grid or measure likely too coarse for the integrand."""
