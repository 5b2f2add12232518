"""Exception hierarchy shared by all efetlab modules."""


class EfetlabError(Exception):
    """Base class for every error raised by the library."""


class DomainError(EfetlabError, ValueError):
    """Input outside the domain of the operation (poles, guards, bad ranges)."""


class OutOfRangeError(DomainError, IndexError):
    """Index beyond a finite coefficient list."""


class PrecisionError(EfetlabError):
    """Working precision is exhausted; rerun with more bits."""


class ConvergenceError(EfetlabError):
    """An iterative or adaptive procedure did not converge.

    ``estimate`` is the last value obtained and ``gap`` the last
    discrepancy between successive refinements, when available.
    """

    def __init__(self, message, estimate=None, gap=None, **info):
        super().__init__(message)
        self.estimate = estimate
        self.gap = gap
        self.info = info


class EvaluationError(EfetlabError):
    """Integrand or callable produced a non-finite or vanishing value."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class ProximityError(EvaluationError):
    """Evaluation point is numerically indistinguishable from a zero of F."""


class ConsistencyError(EfetlabError):
    """Two independent computations that must agree did not."""


class DegenerateProfileError(EfetlabError):
    """Counting profile has no zeros at all (exponential-function candidate)."""


class WitnessNotFoundError(EfetlabError):
    """The combinatorial search found no admissible witness."""


class ConfigError(EfetlabError):
    """Experiment configuration is malformed or invalid."""
