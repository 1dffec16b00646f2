"""Exception hierarchy shared by all modules."""


class TailsumError(Exception):
    """Base class for errors raised by tailsum."""

    code = "error"


class DomainError(TailsumError, ValueError):
    """An argument lies outside the domain of an operation."""

    code = "domain"


class PoleError(DomainError):
    """Evaluation at a pole of a special function or printed formula."""

    code = "pole"


class SupportError(DomainError):
    """Evaluation point outside the interior of the severity support."""

    code = "support"


class ZeroCountAtomError(DomainError):
    """Requested level is at or below P[N=0]; the quantile is the zero atom."""

    code = "zero_atom"


class MethodInapplicableError(TailsumError):
    """An approximation is not defined for the given models."""

    code = "inapplicable"


class InfiniteMeanError(MethodInapplicableError):
    """The method needs a severity moment that diverges."""

    code = "infinite_moment"


class SeriesDivergenceError(TailsumError):
    """A perturbative term blew up relative to the running partial sum."""

    code = "diverging"

    def __init__(self, message, series=None):
        super().__init__(message)
        self.series = series


class ConvergenceError(TailsumError):
    """An iterative solver failed to converge."""

    code = "no_convergence"


class InsufficientSamplesError(TailsumError, ValueError):
    """Too few Monte Carlo samples for the requested tail level."""

    code = "insufficient_samples"

    def __init__(self, message, required):
        super().__init__(message)
        self.required = required


class ConfigError(TailsumError):
    """Invalid run configuration."""

    code = "config"
