"""Exception types raised across the package."""


class SupersolError(Exception):
    """Base class for all package errors."""


class DomainError(SupersolError, ValueError):
    """Argument lies outside the domain [0, a_f) of a nonlinearity."""


class NotIntegrable(SupersolError):
    """f^(-1/(1-p)) is not integrable at zero, so F does not exist."""


class NoPositivePrimitive(SupersolError):
    """The tail integral defining G diverges."""


class NotApplicable(SupersolError):
    """The requested bound or check does not apply to these parameters."""


class OutsideDomain(SupersolError, ValueError):
    """A point does not belong to the domain."""


class InvalidRadius(SupersolError, ValueError):
    """A radius is outside the admissible range."""


class InvalidSpec(SupersolError, ValueError):
    """A problem specification violates its invariants."""


class GridTooCoarse(SupersolError):
    """Richardson slope of a finite-difference residual is far from 2."""


class Blowup(SupersolError):
    """An ODE trajectory exceeded the blow-up threshold."""


class ExistenceConditionFailed(SupersolError):
    """The cone construction requires beta_q < lambda_1."""


class NumericFailure(SupersolError):
    """An internal solver did not converge."""
