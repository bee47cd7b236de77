"""
xxzff.errors
~~~~~~~~~~~~

This module contains errors that are raised by this package.

"""

from typing import Optional


class XXZError(RuntimeError):
    """There was a non-specific error in xxzff.

    This class represents a generic error. It extends :py:exc:`RuntimeError`
    and does not add any additional attributes.
    """


class InvalidConfigError(XXZError):
    """The run configuration or an excitation description was invalid."""


class DomainError(XXZError, ValueError):
    """An argument was outside the domain of the requested operation."""


class NumericalError(XXZError):
    """A numerical procedure failed.

    This class represents a failure of a solver, a quadrature or an
    extrapolation. It extends :py:exc:`XXZError` and adds attributes of
    its own.

    .. attribute:: residual:

      The residual or error estimate reached before giving up, if known

      :type: float

    .. attribute:: tolerance:

      The tolerance that was requested

      :type: float

    """

    residual: Optional[float]
    tolerance: Optional[float]

    def __init__(
        self,
        message: str,
        residual: Optional[float] = None,
        tolerance: Optional[float] = None,
    ) -> None:
        super().__init__(message)
        self.residual = residual
        self.tolerance = tolerance


class PoleError(NumericalError):
    """An argument hit a pole of a kernel or a bare phase."""


class ConvergenceError(NumericalError):
    """An adaptive quadrature or extrapolation did not reach its tolerance."""


class SingularSystemError(NumericalError):
    """The discretized integral operator was singular."""


class NoRootError(NumericalError):
    """The Fermi endpoint could not be bracketed or located."""


class DegenerateStringError(NumericalError):
    """A string existence condition had a vanishing factor."""


class SingularityError(NumericalError):
    """An excluded coincidence of rapidities or an edge singularity was hit."""


class RegimeError(NumericalError):
    """The requested point lies on a regime boundary."""


class NonMonotoneError(NumericalError):
    """A dressed momentum could not be inverted along its contour."""


class CacheError(XXZError):
    """There was a problem with the on-disk cache."""


class CacheMissError(CacheError):
    """No cache entry exists for the requested parameters."""


class CacheVersionError(CacheError):
    """A cache entry has the wrong format version or is corrupted."""
