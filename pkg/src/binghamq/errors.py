"""Exception types raised by the numerics."""


class BinghamError(Exception):
    """Base class for every error raised by this package."""


class NonAdmissible(BinghamError, ValueError):
    """Q has an eigenvalue outside the open interval (-1/3, 2/3)."""


class NoConvergence(BinghamError, RuntimeError):
    """An iterative solve hit its iteration limit.

    ``best_residual`` carries the smallest residual reached.
    """

    def __init__(self, message, best_residual=float("nan")):
        super().__init__(message)
        self.best_residual = best_residual


class SubCritical(BinghamError, ValueError):
    """Requested quantity only exists on the nematic branch (alpha > alpha*)."""


class AdmissibilityLost(BinghamError, RuntimeError):
    """A time step produced an inadmissible Q (step too large or boundary approach)."""


class CFLViolation(BinghamError, RuntimeError):
    """Advective CFL number exceeds the allowed bound before a step."""
