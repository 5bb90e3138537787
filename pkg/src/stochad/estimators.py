"""Delta estimators for the digital option as ``estimate(seed) -> float`` procedures.

Width parameters are measured either in absolute units of the trigger
``X = S_T - K`` or in standard deviations of ``X`` on the current seed
(``WidthUnit.STDDEV``, the default for the benchmark). The finite difference
uses the same width as its central shift on ``S0``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

import numpy as np

from .indicator_diff import IndicatorDiffStrategy, Variant
from .model_bs import (
    BlackScholesParams,
    DigitalOption,
    TapedModel,
    _check_maturity,
    analytic_digital_delta,
    likelihood_ratio_delta_weight,
    standard_normals,
    terminal_growth,
    terminal_on_tape,
)
from .randomvar import RandomVariable
from .tape import DifferentiableRV, backward


class EstimatorKind(str, Enum):
    FINITE_DIFFERENCE = "fd"
    STOCH_AD = "stochad"
    STOCH_AD_REGRESSION = "regression"
    LIKELIHOOD_RATIO = "lr"
    ANALYTIC = "analytic"


class WidthUnit(str, Enum):
    ABSOLUTE = "absolute"
    STDDEV = "stddev"


class ShiftConvention(str, Enum):
    HALF = "half"  # S0 +- h/2, total width h
    FULL = "full"  # S0 +- h, total width 2h


@dataclass(frozen=True)
class EstimatorSpec:
    kind: EstimatorKind
    label: str
    strategy: IndicatorDiffStrategy | None = None
    shift: float | None = None
    width_unit: WidthUnit = WidthUnit.ABSOLUTE
    shift_convention: ShiftConvention = ShiftConvention.HALF

    def __post_init__(self):
        object.__setattr__(self, "kind", EstimatorKind(self.kind))
        object.__setattr__(self, "width_unit", WidthUnit(self.width_unit))
        object.__setattr__(self, "shift_convention", ShiftConvention(self.shift_convention))
        if self.kind is EstimatorKind.FINITE_DIFFERENCE and not (self.shift and self.shift > 0):
            raise ValueError("finite difference needs a positive shift")
        if self.kind in (EstimatorKind.STOCH_AD, EstimatorKind.STOCH_AD_REGRESSION) and self.strategy is None:
            raise ValueError(f"{self.kind.value} needs an indicator strategy")


def digital_payoff(option: DigitalOption) -> Callable[[TapedModel], DifferentiableRV]:
    def payoff(model: TapedModel) -> DifferentiableRV:
        return (model.S_T - option.K).indicator() * model.discount_factor(option.T)
    return payoff


def call_payoff(K: float, T: float) -> Callable[[TapedModel], DifferentiableRV]:
    def payoff(model: TapedModel) -> DifferentiableRV:
        return (model.S_T - K).maximum(0.0) * model.discount_factor(T)
    return payoff


def tape_delta(params: BlackScholesParams, normals: np.ndarray, payoff, strategy) -> float:
    """Mean adjoint of ``S0`` for the taped ``payoff(model)``."""
    model = terminal_on_tape(params, normals)
    return backward(payoff(model), strategy)[model.S0].expectation()


def finite_difference_delta(params: BlackScholesParams, option: DigitalOption, normals: np.ndarray,
                            shift: float, width_unit=WidthUnit.ABSOLUTE,
                            convention=ShiftConvention.HALF) -> float:
    """Central difference of the digital value on common random numbers."""
    growth = terminal_growth(params, normals)
    h = shift
    if WidthUnit(width_unit) is WidthUnit.STDDEV:
        h = shift * RandomVariable._wrap(params.S0 * growth - option.K).standard_deviation()
    half = 0.5 * h if ShiftConvention(convention) is ShiftConvention.HALF else h

    def value(s0: float) -> float:
        return params.discount_factor * float(np.mean(s0 * growth - option.K > 0.0))

    return (value(params.S0 + half) - value(params.S0 - half)) / (2.0 * half)


def likelihood_ratio_delta(params: BlackScholesParams, option: DigitalOption, normals: np.ndarray) -> float:
    s_t = params.S0 * terminal_growth(params, normals)
    payoff = params.discount_factor * (s_t - option.K > 0.0)
    weight = likelihood_ratio_delta_weight(params, s_t).as_array()
    return float(np.mean(payoff * weight))


def estimate_delta(spec: EstimatorSpec, params: BlackScholesParams, option: DigitalOption,
                   n: int, seed: int, normals: np.ndarray | None = None) -> float:
    """Delta ``dV/dS0`` of the digital option on one seed.

    ``normals`` may be passed to share the paths of a seed across estimators.
    """
    _check_maturity(params, option)
    if spec.kind is EstimatorKind.ANALYTIC:
        return analytic_digital_delta(params, option.K)
    if normals is None:
        normals = standard_normals(n, seed)
    if spec.kind is EstimatorKind.FINITE_DIFFERENCE:
        return finite_difference_delta(params, option, normals, spec.shift,
                                       spec.width_unit, spec.shift_convention)
    if spec.kind is EstimatorKind.LIKELIHOOD_RATIO:
        return likelihood_ratio_delta(params, option, normals)
    return tape_delta(params, normals, digital_payoff(option), spec.strategy)


def table_estimators(w: float, w_phi: float = 0.5, m: int = 2, regression: str = "distribution",
                     width_unit=WidthUnit.STDDEV,
                     shift_convention=ShiftConvention.HALF) -> list[EstimatorSpec]:
    """The five rows of the comparison tables for width ``w``."""
    relative = WidthUnit(width_unit) is WidthUnit.STDDEV
    variant = {"distribution": Variant.DISTRIBUTION_REGRESSION,
               "density": Variant.DENSITY_REGRESSION}[regression]
    return [
        EstimatorSpec(EstimatorKind.FINITE_DIFFERENCE, "Finite Difference", shift=w,
                      width_unit=width_unit, shift_convention=shift_convention),
        EstimatorSpec(EstimatorKind.STOCH_AD, "Stoch. AD",
                      IndicatorDiffStrategy.discretized_delta(w, relative_width=relative)),
        EstimatorSpec(EstimatorKind.STOCH_AD_REGRESSION, "Stoch. AD with Regression",
                      IndicatorDiffStrategy(variant, w, w_phi, m, relative_width=relative)),
        EstimatorSpec(EstimatorKind.LIKELIHOOD_RATIO, "Likelihood Ratio"),
        EstimatorSpec(EstimatorKind.ANALYTIC, "Analytic"),
    ]


def with_strategy(spec: EstimatorSpec, strategy: IndicatorDiffStrategy) -> EstimatorSpec:
    return replace(spec, strategy=strategy)
