"""Localized least-squares estimators of the density of a trigger at zero.

Two estimators of ``phi_X(0)`` are provided:

* :func:`fit_density` regresses samples of the empirical density
  ``d~(x) = #{X in [0, x]} / (n x)`` on ``1, x, ..., x^(m-1)`` and returns
  the intercept.
* :func:`fit_distribution` regresses the signed empirical distribution
  ``D^(x) = +-#{X between 0 and x} / n`` on ``x, ..., x^m`` (no constant,
  so ``D(0) = 0``) and returns the slope.

For ``x < 0`` the counts run over ``[x, 0]``; ``d~`` stays positive and
``D^`` is negative, so both are regular two-sided samples around 0.

Counting is done once on a stable sort of the samples in the window and
looked up by rank.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from .errors import EmptyWindowError, SingularRegressionError, TooFewSamplesError
from .randomvar import RandomVariable

#: relative pivot size below which the normal matrix counts as singular
PIVOT_TOLERANCE = 1e-12


class BasisKind(str, Enum):
    DENSITY = "density"  # 1_W * x**i, i = 0..m-1
    DISTRIBUTION = "distribution"  # 1_W * x**i, i = 1..m


@dataclass(frozen=True)
class RegressionBasis:
    """Polynomial basis localized to ``|X| < half_width``."""

    order: int
    half_width: float
    kind: BasisKind = BasisKind.DENSITY

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("basis order must be >= 1")
        if not self.half_width > 0:
            raise ValueError("window half-width must be positive")

    @property
    def powers(self) -> np.ndarray:
        start = 0 if BasisKind(self.kind) is BasisKind.DENSITY else 1
        return np.arange(start, start + self.order)


@dataclass(frozen=True)
class DensitySamples:
    """Scatter ``(x_i, y_i)`` of in-window paths, ``0 < |x_i| <= r``."""

    x: np.ndarray
    y: np.ndarray
    r: float

    def __post_init__(self):
        if self.x.shape != self.y.shape:
            raise ValueError("x and y must have equal length")
        if np.any(self.x == 0.0):
            raise ValueError("the point x = 0 must be excluded")
        if np.any(np.abs(self.x) > self.r):
            raise ValueError("samples outside the half-window r")

    def __len__(self) -> int:
        return self.x.size


def _samples(x) -> np.ndarray:
    return RandomVariable(x).as_array()


def _signed_counts(x: np.ndarray, r: float) -> tuple[np.ndarray, np.ndarray]:
    """In-window points and the number of samples between 0 and each point.

    The interval is closed, so a point always counts itself.
    """
    if not r > 0:
        raise ValueError("half-window r must be positive")
    near = x[np.abs(x) <= r]
    points = near[near != 0.0]
    # every sample between 0 and an in-window point is itself in the window
    ordered = np.sort(near, kind="stable")
    zero_left = np.searchsorted(ordered, 0.0, side="left")
    zero_right = np.searchsorted(ordered, 0.0, side="right")
    positive = points > 0.0
    counts = np.where(
        positive,
        np.searchsorted(ordered, points, side="right") - zero_left,
        zero_right - np.searchsorted(ordered, points, side="left"),
    )
    return points, counts.astype(np.float64)


def empirical_density_samples(x, r: float) -> DensitySamples:
    """Samples ``(X(w_i), d~(X(w_i)))`` for paths with ``0 < |X(w_i)| <= r``."""
    values = _samples(x)
    points, counts = _signed_counts(values, r)
    return DensitySamples(points, counts / (values.size * np.abs(points)), float(r))


def empirical_distribution_samples(x, r: float) -> DensitySamples:
    """Samples ``(X(w_i), D^(X(w_i)))`` of the signed distribution around 0."""
    values = _samples(x)
    points, counts = _signed_counts(values, r)
    return DensitySamples(points, np.sign(points) * counts / values.size, float(r))


def _factor(gram: np.ndarray):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(gram)
    pivots = np.abs(np.diag(lu))
    if pivots.max() == 0.0 or pivots.min() < PIVOT_TOLERANCE * pivots.max():
        raise SingularRegressionError("normal matrix is singular")
    return lu, piv


def solve_normal_equations(design: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares coefficients via ``(B'B) c = B'y`` and a pivoted LU solve."""
    if design.shape[0] < design.shape[1]:
        raise TooFewSamplesError(
            f"{design.shape[0]} samples for {design.shape[1]} basis functions")
    return scipy.linalg.lu_solve(_factor(design.T @ design), design.T @ y)


def _polynomial_fit(x: np.ndarray, y: np.ndarray, powers: np.ndarray, scale: float) -> np.ndarray:
    # regress on x / scale for conditioning, then undo the scaling
    design = np.power.outer(x / scale, powers)
    coefficients = solve_normal_equations(design, y)
    return coefficients / np.power(scale, powers)


def fit_polynomial(samples: DensitySamples, powers) -> np.ndarray:
    """Least-squares coefficients of ``y ~ sum_k c_k x**powers[k]``."""
    powers = np.asarray(powers)
    if len(samples) < powers.size:
        raise TooFewSamplesError(f"{len(samples)} samples for {powers.size} basis functions")
    return _polynomial_fit(samples.x, samples.y, powers, samples.r)


def fit_density(samples: DensitySamples, m: int = 2) -> float:
    """Intercept ``d*(0)`` of the order-``m`` fit of ``d~`` over the window."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return float(fit_polynomial(samples, np.arange(m))[0])


def fit_distribution(x, r: float, m: int = 2) -> float:
    """Slope at 0 of the fit of ``D^`` on ``x, ..., x^m``; estimates ``phi_X(0)``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    samples = empirical_distribution_samples(x, r)
    return fit_distribution_samples(samples, m)


def fit_distribution_samples(samples: DensitySamples, m: int = 2) -> float:
    return float(fit_polynomial(samples, np.arange(1, m + 1))[0])


def _window(x: np.ndarray, half_width: float) -> np.ndarray:
    return np.abs(x) < half_width


def localized_least_squares(y, x, basis: RegressionBasis) -> np.ndarray:
    """Coefficients of ``min ||B c - Y||`` over paths with ``|X| < half_width``.

    Paths outside the window are zero rows of ``B`` and drop out.
    """
    yv, xv = _samples(y), _samples(x)
    if RandomVariable(y).is_deterministic:
        yv = np.full(xv.size, yv[0])
    if yv.size != xv.size:
        raise ValueError("Y and X must have the same number of paths")
    inside = _window(xv, basis.half_width)
    if not inside.any():
        raise EmptyWindowError(f"no path with |X| < {basis.half_width}")
    return _polynomial_fit(xv[inside], yv[inside], basis.powers, basis.half_width)


def intercept_weights(x, half_width: float, m: int) -> np.ndarray:
    """Path weights ``lambda`` with ``lambda . Y`` = local order-``m`` intercept of ``Y``.

    ``lambda = B (B'B)^-1 e_0`` for the basis ``1_W x^i``, ``i < m``; zero
    outside the window. For ``m = 1`` this is ``1_W / #W``.
    """
    xv = _samples(x)
    inside = _window(xv, half_width)
    if not inside.any():
        raise EmptyWindowError(f"no path with |X| < {half_width}")
    design = np.power.outer(xv[inside] / half_width, np.arange(m))
    if design.shape[0] < m:
        raise TooFewSamplesError(f"{design.shape[0]} paths in window for order {m}")
    e0 = np.zeros(m)
    e0[0] = 1.0
    weights = np.zeros(xv.size)
    weights[inside] = design @ scipy.linalg.lu_solve(_factor(design.T @ design), e0)
    return weights
