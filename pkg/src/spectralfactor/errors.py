"""Exception and warning classes shared by every stage."""


class SpectralError(Exception):
    """Base class for all numerical failures raised by this package."""


class DomainError(SpectralError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class AliasingError(SpectralError, ValueError):
    """The frequency grid is too coarse for the requested number of coefficients."""


class GridMismatchError(SpectralError, ValueError):
    """Two boundary functions live on different frequency grids."""


class AdmissibilityError(SpectralError):
    """A density is not strictly positive (or falls below the configured floor).

    Attributes
    ----------
    omega : float or None
        Frequency of the offending sample, when one can be named.
    value : float or None
        The offending sample value.
    """

    def __init__(self, message, omega=None, value=None):
        super().__init__(message)
        self.omega = omega
        self.value = value


class DiagnosticError(SpectralError):
    """A computed quantity failed an internal consistency check.

    ``residual`` carries the measured value and ``tolerance`` the bound it broke.
    """

    def __init__(self, message, residual=None, tolerance=None):
        super().__init__(message)
        self.residual = residual
        self.tolerance = tolerance


class SingularQuotientError(SpectralError, ZeroDivisionError):
    """Division by a spectral factor that is numerically zero."""


class ConditioningWarning(RuntimeWarning):
    """A linear system is too ill-conditioned for its solution to be trusted."""


class QuadratureWarning(RuntimeWarning):
    """The grid is too coarse to resolve a radial kernel at the requested radius."""
