"""Replacements for the derivative of the indicator ``1_{X>0}`` in the adjoint sweep.

Every strategy injects a random variable of the form

    lambda(X) * n * d*(0)

in place of ``d/dX 1_{X>0}``, where ``lambda`` are path weights whose dot
product with a random variable estimates its conditional expectation at
``X = 0`` and ``d*(0)`` estimates the density ``phi_X(0)``. With the window
``W = {|X| < w/2}`` and ``p = E(1_W)``:

=============================  ==============================  ======================
variant                        conditional expectation         density ``d*(0)``
=============================  ==============================  ======================
``DISCRETIZED_DELTA``          projection ``1_W / (n p)``      window count ``p / w``
``PROJECTION``                 projection ``1_W / (n p)``      window count ``p / w``
``LINEAR_CONDITIONAL``         local linear fit (order ``m``)  window count ``p / w``
``DENSITY_REGRESSION``         projection ``1_W / (n p)``      fit of ``d~`` (order m)
``DISTRIBUTION_REGRESSION``    projection ``1_W / (n p)``      slope of ``D^`` (order m)
=============================  ==============================  ======================

The first two rows coincide with the classic ``(1/w) 1_W`` discretized delta.
The regression window for the density is ``+-(w_phi/2) stddev(X)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import regression
from .errors import EmptyWindowError
from .randomvar import RandomVariable


class Variant(str, Enum):
    DISCRETIZED_DELTA = "discretized_delta"
    PROJECTION = "projection"
    LINEAR_CONDITIONAL_REGRESSION = "linear_conditional_regression"
    DENSITY_REGRESSION = "density_regression"
    DISTRIBUTION_REGRESSION = "distribution_regression"


_REGRESSION_VARIANTS = (Variant.DENSITY_REGRESSION, Variant.DISTRIBUTION_REGRESSION)


@dataclass(frozen=True)
class IndicatorDiffStrategy:
    """How ``d/dX 1_{X>0}`` is replaced.

    Attributes:
        variant: Which estimator to inject.
        w: Width of the localization window ``|X| < w/2``. Absolute units
            of ``X`` unless ``relative_width`` is set, in which case the
            window is ``|X| < (w/2) stddev(X)``.
        w_phi: Width of the density regression window in units of
            ``stddev(X)`` (regression variants only).
        m: Order of the density regression basis, or of the conditional
            expectation basis for ``LINEAR_CONDITIONAL_REGRESSION``.
        relative_width: Measure ``w`` in standard deviations of ``X``.
        window_count_density: Replace the regression density by the
            windowed count ``p / w`` (degenerate 0-order regression).
    """

    variant: Variant = Variant.DISTRIBUTION_REGRESSION
    w: float = 0.05
    w_phi: float | None = None
    m: int = 2
    relative_width: bool = False
    window_count_density: bool = False

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not self.w > 0:
            raise ValueError("w must be positive")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.variant in _REGRESSION_VARIANTS:
            if self.w_phi is None:
                object.__setattr__(self, "w_phi", 0.5)
            if not self.w_phi > 0:
                raise ValueError("w_phi must be positive")

    @classmethod
    def discretized_delta(cls, w: float, **kw) -> "IndicatorDiffStrategy":
        return cls(Variant.DISCRETIZED_DELTA, w, **kw)

    @classmethod
    def projection(cls, w: float, **kw) -> "IndicatorDiffStrategy":
        return cls(Variant.PROJECTION, w, m=1, **kw)

    @classmethod
    def linear_conditional(cls, w: float, m: int = 2, **kw) -> "IndicatorDiffStrategy":
        return cls(Variant.LINEAR_CONDITIONAL_REGRESSION, w, m=m, **kw)

    @classmethod
    def density_regression(cls, w: float, w_phi: float = 0.5, m: int = 2, **kw):
        return cls(Variant.DENSITY_REGRESSION, w, w_phi, m, **kw)

    @classmethod
    def distribution_regression(cls, w: float, w_phi: float = 0.5, m: int = 2, **kw):
        return cls(Variant.DISTRIBUTION_REGRESSION, w, w_phi, m, **kw)

    def pinned(self) -> "IndicatorDiffStrategy":
        """Same strategy with the density pinned to the windowed count."""
        return replace(self, window_count_density=True)

    def width(self, x: RandomVariable) -> float:
        """Absolute window width on ``x``."""
        if self.relative_width:
            return self.w * RandomVariable(x).standard_deviation()
        return self.w

    def regression_half_width(self, x: RandomVariable) -> float:
        return 0.5 * self.w_phi * RandomVariable(x).standard_deviation()

    def injection(self, x: RandomVariable) -> RandomVariable:
        return injection(x, self)


def window_indicator(x, w: float) -> RandomVariable:
    """``1_{|X| < w/2}`` path-wise."""
    if not w > 0:
        raise ValueError("w must be positive")
    return RandomVariable(x).apply(lambda v: (np.abs(v) < 0.5 * w).astype(np.float64))


def discretized_delta(x, w: float) -> RandomVariable:
    """Classic ``(1/w) 1_{|X| < w/2}`` approximation of the Dirac delta."""
    return window_indicator(x, w) * (1.0 / w)


def density_estimate(x, strategy: IndicatorDiffStrategy) -> float:
    """The estimate ``d*(0)`` of ``phi_X(0)`` used by ``strategy``."""
    x = RandomVariable(x)
    w = strategy.width(x)
    if strategy.variant not in _REGRESSION_VARIANTS or strategy.window_count_density:
        return window_indicator(x, w).expectation() / w
    r = strategy.regression_half_width(x)
    if strategy.variant is Variant.DENSITY_REGRESSION:
        return regression.fit_density(regression.empirical_density_samples(x, r), strategy.m)
    return regression.fit_distribution(x, r, strategy.m)


def injection(x, strategy: IndicatorDiffStrategy) -> RandomVariable:
    """Random variable substituted for ``d/dX 1_{X>0}`` in the backward sweep."""
    x = RandomVariable(x)
    w = strategy.width(x)
    window = window_indicator(x, w)
    p = window.expectation()
    if p == 0.0:
        if strategy.variant is Variant.DISCRETIZED_DELTA:
            return RandomVariable.constant(0.0)
        raise EmptyWindowError(f"no path with |X| < {w / 2:g}")
    density = density_estimate(x, strategy)
    if strategy.variant is Variant.LINEAR_CONDITIONAL_REGRESSION:
        weights = regression.intercept_weights(x, 0.5 * w, strategy.m)
        return RandomVariable._wrap(weights * (x.size * density))
    return window * (density / p)


def conditional_expectation_estimate(a, x, strategy: IndicatorDiffStrategy) -> float:
    """Estimate of ``E(A | X = 0)`` from paths in the window ``|X| < w/2``.

    ``PROJECTION`` (and the density variants) use the window mean. For
    ``LINEAR_CONDITIONAL_REGRESSION`` with ``m = 2`` the explicit formula is
    used; higher orders go through :func:`regression.localized_least_squares`.
    """
    a, x = RandomVariable(a), RandomVariable(x)
    w = strategy.width(x)
    window = window_indicator(x, w)
    p = window.expectation()
    if p == 0.0:
        raise EmptyWindowError(f"no path with |X| < {w / 2:g}")
    if strategy.variant is not Variant.LINEAR_CONDITIONAL_REGRESSION or strategy.m == 1:
        return (window * a).expectation() / p
    if strategy.m == 2:
        return linear_intercept(a, x, w)
    basis = regression.RegressionBasis(strategy.m, 0.5 * w)
    return float(regression.localized_least_squares(a, x, basis)[0])


def linear_intercept(a, x, w: float) -> float:
    """Explicit local linear intercept ``[E(X~^2)E(A~) - E(X~)E(A~X~)] / [E(X~^2) - E(X~)^2]``.

    The tilde quantities are the window-restricted ``1_W X`` and ``1_W A``.
    All moments are conditional on the window (divided by ``p``); only then
    is the ratio the least-squares intercept when some paths fall outside.
    """
    a, x = RandomVariable(a), RandomVariable(x)
    window = window_indicator(x, w)
    p = window.expectation()
    if p == 0.0:
        raise EmptyWindowError(f"no path with |X| < {w / 2:g}")
    xt, at = window * x, window * a
    # window-conditional moments
    ex, ea = xt.expectation() / p, at.expectation() / p
    exx, eax = (xt * xt).expectation() / p, (at * xt).expectation() / p
    denominator = exx - ex * ex
    if not abs(denominator) > 1e-12 * max(exx, np.finfo(float).tiny):
        raise regression.SingularRegressionError("window has no spread in X")
    return (exx * ea - ex * eax) / denominator
