"""Expected stochastic algorithmic differentiation of indicator functions."""

from .errors import (
    DomainError,
    EmptyWindowError,
    LengthMismatchError,
    SingularRegressionError,
    StochADError,
    TapeError,
    TooFewSamplesError,
)
from .indicator_diff import IndicatorDiffStrategy, Variant, discretized_delta, injection, window_indicator
from .model_bs import BlackScholesParams, DigitalOption
from .randomvar import RandomVariable
from .tape import DifferentiableRV, Tape, backward, derivative_of_expectation

__version__ = "0.1.0"
