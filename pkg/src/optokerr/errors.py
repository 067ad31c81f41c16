"""Exception types raised by the solver library."""

from __future__ import annotations


class OptokerrError(Exception):
    """Base class for all library-specific errors."""


class RootFindingError(OptokerrError):
    """Polynomial root finding failed or a root failed its residual check.

    Carries the offending coefficient vector for diagnosis.
    """

    def __init__(self, message, coefficients=None):
        super().__init__(message)
        self.coefficients = tuple(coefficients) if coefficients is not None else None


class ResidualError(OptokerrError):
    """A candidate steady-state value was rejected by a residual test."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class StructuralError(OptokerrError):
    """A matrix or report violates a structural identity it must satisfy."""


class SingularResponseError(OptokerrError):
    """The first-order response system is singular (resonant degeneracy).

    ``pivot_name`` identifies the near-vanishing diagonal factor.
    """

    def __init__(self, message, pivot_name=None, pivot_value=None):
        super().__init__(message)
        self.pivot_name = pivot_name
        self.pivot_value = pivot_value


class ZeroCrossingNotFoundError(OptokerrError):
    """No sign change of the absorption inside the scan window.

    ``scan_summary`` holds (window, n_points, min, max) of the scanned values.
    """

    def __init__(self, message, scan_summary=None):
        super().__init__(message)
        self.scan_summary = scan_summary


class BranchUnavailableError(OptokerrError):
    """The requested steady-state branch is absent or unstable.

    ``available`` lists usable branch indices.
    """

    def __init__(self, message, available=()):
        super().__init__(message)
        self.available = tuple(available)


class StiffnessError(OptokerrError):
    """Adaptive step size underflowed; the problem is too stiff at this state."""

    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


class FoldNotFoundError(OptokerrError):
    """A parameter sweep did not contain the fold structure the caller needs."""


class ConfigError(OptokerrError):
    """A run configuration failed to parse or validate."""
