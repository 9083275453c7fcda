"""Exception hierarchy shared by all modules."""


class LomaxMixError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(LomaxMixError, ValueError):
    """Invalid (non-finite, non-positive, unnormalized) model parameters."""


class DomainError(LomaxMixError, ValueError):
    """Argument outside the support of a function."""


class EmptyCorpusError(LomaxMixError, ValueError):
    def __init__(self, msg="empty corpus"):
        super().__init__(msg)


class InsufficientDataError(LomaxMixError, ValueError):
    """Histogram too small for the requested model."""


class InsufficientBinsError(LomaxMixError, ValueError):
    def __init__(self, n_bins, n_free_params):
        self.n_bins = n_bins
        self.n_free_params = n_free_params
        super().__init__(
            f"insufficient bins for dof: {n_bins} bins, {n_free_params} free parameters"
        )


class BoundaryError(LomaxMixError):
    """Maximum-likelihood estimate lies on the boundary of the parameter space."""


class ConvergenceError(LomaxMixError):
    """Iterative fit failed to converge; ``best`` carries the best-so-far result."""

    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


class NumericError(LomaxMixError, ArithmeticError):
    """Numerical failure: quadrature non-convergence, unstable integration."""
