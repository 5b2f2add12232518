"""efetlab: numerical laboratory for entire functions of exponential type with unimodular-type Taylor data."""
from .errors import (ConfigError, ConsistencyError, ConvergenceError, DegenerateProfileError, DomainError,
                     EfetlabError, EvaluationError, OutOfRangeError, PrecisionError, ProximityError,
                     WitnessNotFoundError)
from .mpcore import DEFAULT_CONTEXT, PrecisionContext
from .sequences import CoefficientSequence, catalogue, from_descriptor
from .taylor import TaylorFunction, taylor

__version__ = "0.1.0"

__all__ = ["CoefficientSequence", "ConfigError", "ConsistencyError", "ConvergenceError", "DEFAULT_CONTEXT",
           "DegenerateProfileError", "DomainError", "EfetlabError", "EvaluationError", "OutOfRangeError",
           "PrecisionContext", "PrecisionError", "ProximityError", "TaylorFunction", "WitnessNotFoundError",
           "catalogue", "from_descriptor", "taylor"]
