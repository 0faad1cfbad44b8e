"""Exception types raised by voltdiff."""


class ConfigurationError(ValueError):
    """Invalid grid, model or solver configuration."""


class GridMismatchError(ValueError):
    """Two sampled functions do not live on the same grid."""


class DegenerateDirectionError(ArithmeticError):
    """A search direction has (numerically) zero curvature."""


class NumericalError(ArithmeticError):
    """A non-finite value showed up during the iteration.

    Attributes
    ----------
    alpha : float or None
        The step length at which the offending value was produced.
    """

    def __init__(self, message, alpha=None):
        super().__init__(message)
        self.alpha = alpha
