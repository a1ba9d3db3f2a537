"""Exception types for phase-space filtering routines."""


class PhaseSpaceError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PhaseSpaceError):
    """Invalid parameter value (negative width, bad parity, null state, ...)."""


class SingularPQDError(PhaseSpaceError):
    """Requested s-ordered quasiprobability does not exist as a regular function.

    Raised when the integrand of the phase-space transform fails to decay at
    the quadrature cutoff, which is the numerical signature of a distributional
    (delta-like or worse) quasiprobability at the requested ordering.
    """

    def __init__(self, message, s=None, boundary_max=None, cutoff=None):
        super().__init__(message)
        self.s = s
        self.boundary_max = boundary_max
        self.cutoff = cutoff


class FilterTooWeakError(SingularPQDError):
    """Filter decay is insufficient to regularize the requested state."""


class QuadratureError(PhaseSpaceError):
    """Quadrature failed to converge within the node budget."""


class UnsamplableFilterError(PhaseSpaceError):
    """Filter does not define a displacement probability density to sample."""


class UnsupportedRouteError(PhaseSpaceError):
    """Requested computation route is not available for these inputs."""


class TruncationError(PhaseSpaceError):
    """Fock-space truncation too small to represent the requested object."""


class SearchError(PhaseSpaceError):
    """Width search failed; carries the best width found so far."""

    def __init__(self, message, best_width=None, best_certificate=None):
        super().__init__(message)
        self.best_width = best_width
        self.best_certificate = best_certificate
