"""Exception and warning types shared across the toolkit."""


class IteigError(Exception):
    """Base class for all toolkit errors."""


class InvalidProfile(IteigError):
    """Refraction profile violates positivity on [0, 1]."""


class QuadratureFailure(IteigError):
    """Adaptive quadrature did not reach the requested tolerance."""


class DomainError(IteigError, ValueError):
    """Argument outside the mathematical domain of the operation."""


class StepUnderflow(IteigError):
    """ODE step controller stalled; carries the last reached abscissa."""

    def __init__(self, message, last_x=None):
        super().__init__(message)
        self.last_x = last_x


class BoundaryZero(IteigError):
    """|f| vanishes (or phase is unresolvable) on a contour; perturb the box."""


class Unresolved(IteigError):
    """Winding > 1 persisted at the minimum box size, or counts disagree."""


class NoConvergence(IteigError):
    """Iterative refinement failed to converge."""


class NotAnEigenvalue(IteigError):
    """|D(k)| is too large relative to the local term scale."""


class DegenerateProfile(IteigError):
    """D is numerically identically zero (n == 1 everywhere)."""


class RegionTooSmall(IteigError):
    """Requested sector or disk is not covered by the computed region."""


class InsufficientData(IteigError):
    """Too few zeros or eigenvalues for a meaningful fit."""


class ParseError(IteigError):
    """Malformed input file; carries file/field context in the message."""


class StripMismatchWarning(UserWarning):
    """Real-axis bisection count differs from the strip winding count.

    Signals a genuinely complex zero near the axis (reported, not fatal).
    """
