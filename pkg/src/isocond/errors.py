"""Exception types shared across the package."""


class IsocondError(Exception):
    """Base class for all errors raised by isocond."""


class InvalidArgumentError(IsocondError, ValueError):
    pass


class PreconditionError(IsocondError, ValueError):
    """An input violates a documented precondition (e.g. a non-isotropic model set)."""


class ConfigError(IsocondError, ValueError):
    pass


class EmptyRegionError(IsocondError, ValueError):
    """The requested z threshold encloses no part of the grid."""


class DegenerateAlignmentError(IsocondError, ArithmeticError):
    """The projection sum of the r vectors onto the model set is not positive,
    so the conditioning length is infinite or negative."""


class IndeterminateRotationError(IsocondError, ArithmeticError):
    """Both projection sums vanish: every model-set rotation is stationary."""
