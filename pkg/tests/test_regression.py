import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochad.errors import EmptyWindowError, SingularRegressionError, TooFewSamplesError
from stochad.regression import (
    BasisKind,
    DensitySamples,
    RegressionBasis,
    empirical_density_samples,
    empirical_distribution_samples,
    fit_density,
    fit_distribution,
    fit_distribution_samples,
    intercept_weights,
    localized_least_squares,
    solve_normal_equations,
)

PHI0 = 1.0 / np.sqrt(2.0 * np.pi)


def brute_force_count(x, point):
    lo, hi = (0.0, point) if point > 0 else (point, 0.0)
    return sum(lo <= v <= hi for v in x)


def test_single_path_counts_itself():
    s = empirical_density_samples([0.5], 1.0)
    assert s.x.tolist() == [0.5]
    assert s.y.tolist() == [2.0]


def test_uniform_grid_density_sample():
    x = np.arange(1, 11) / 10.0
    s = empirical_density_samples(x, 1.0)
    # 5 of 10 samples lie in [0, 0.5]
    assert s.y[s.x == 0.5][0] == pytest.approx(1.0, rel=1e-15)


def test_zero_sample_excluded():
    s = empirical_density_samples([0.0, 0.2, -0.1], 1.0)
    assert 0.0 not in s.x
    assert len(s) == 2


def test_counts_match_brute_force():
    rng = np.random.RandomState(11)
    x = np.round(rng.standard_normal(400), 2)  # forces ties and exact zeros
    r = 0.6
    dens = empirical_density_samples(x, r)
    dist = empirical_distribution_samples(x, r)
    expected = [brute_force_count(x, p) for p in dens.x]
    np.testing.assert_allclose(dens.y, np.array(expected) / (x.size * np.abs(dens.x)), rtol=1e-14)
    np.testing.assert_allclose(dist.y, np.sign(dist.x) * np.array(expected) / x.size, rtol=1e-14)
    assert np.all(dens.y > 0)
    assert len(dens) == np.sum((np.abs(x) <= r) & (x != 0))


def test_density_samples_validation():
    with pytest.raises(ValueError):
        DensitySamples(np.array([0.0]), np.array([1.0]), 1.0)
    with pytest.raises(ValueError):
        DensitySamples(np.array([2.0]), np.array([1.0]), 1.0)


def _samples(x, y, r=1.0):
    return DensitySamples(np.asarray(x, float), np.asarray(y, float), r)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_fit_density_of_constant(m):
    x = np.linspace(-0.9, 0.9, 10)
    assert fit_density(_samples(x, np.full(10, 0.7)), m) == pytest.approx(0.7, rel=1e-12)


def test_fit_density_collinear():
    x = np.array([-0.5, -0.2, 0.1, 0.3, 0.8])
    assert fit_density(_samples(x, 0.4 + 0.1 * x), 2) == pytest.approx(0.4, rel=1e-12)


def test_fit_density_order_one_is_sample_mean():
    x = np.array([-0.5, -0.2, 0.1, 0.3, 0.8])
    y = np.array([1.0, 2.0, 0.5, 0.25, 4.0])
    assert fit_density(_samples(x, y), 1) == pytest.approx(y.mean(), rel=1e-14)


def test_fit_density_order_one_near_window_count():
    rng = np.random.RandomState(3)
    x = rng.uniform(-1.0, 1.0, 200_000)
    r = 0.25
    window_count = np.mean(np.abs(x) < r) / (2 * r)
    assert fit_density(empirical_density_samples(x, r), 1) == pytest.approx(window_count, rel=0.02)


def test_fit_density_standard_normal():
    x = np.random.RandomState(7).standard_normal(200_000)
    r = 0.25 * x.std()
    assert abs(fit_density(empirical_density_samples(x, r), 2) - PHI0) < 0.02


def test_fit_distribution_uniform():
    x = np.random.RandomState(8).uniform(-1.0, 1.0, 200_000)
    assert abs(fit_distribution(x, 0.5, 2) - 0.5) < 0.01


def test_fit_distribution_exact_polynomial():
    x = np.array([-0.4, -0.1, 0.2, 0.3, 0.7])
    s = _samples(x, 0.3 * x + 0.05 * x ** 2)
    assert fit_distribution_samples(s, 2) == pytest.approx(0.3, rel=1e-12)


def test_fit_distribution_single_sample():
    assert fit_distribution_samples(_samples([0.25], [0.1]), 1) == pytest.approx(0.4, rel=1e-15)


def test_fit_distribution_sign_flip_invariant():
    x = np.random.RandomState(9).standard_normal(5000) + 0.3
    assert fit_distribution(-x, 0.5, 2) == pytest.approx(fit_distribution(x, 0.5, 2), rel=1e-12)
    symmetric = np.concatenate([np.abs(x), -np.abs(x)])
    assert fit_distribution(-symmetric, 0.5, 2) == fit_distribution(symmetric, 0.5, 2)


def test_too_few_and_singular():
    with pytest.raises(TooFewSamplesError):
        fit_density(_samples([0.1], [1.0]), 2)
    with pytest.raises(SingularRegressionError):
        fit_density(_samples([0.1, 0.1, 0.1], [1.0, 2.0, 3.0]), 2)


def test_localized_least_squares_constant():
    x = np.linspace(-1, 1, 21)
    basis = RegressionBasis(1, 0.5)
    assert localized_least_squares(3.5, x, basis) == pytest.approx([3.5])


def test_localized_least_squares_line():
    x = np.linspace(-1, 1, 21)
    y = np.where(np.abs(x) < 0.5, 2 + 3 * x, 100.0)  # outside rows must not matter
    np.testing.assert_allclose(localized_least_squares(y, x, RegressionBasis(2, 0.5)), [2, 3], rtol=1e-12)


def test_localized_least_squares_duplicate_rows():
    rng = np.random.RandomState(1)
    x, y = rng.uniform(-1, 1, 300), rng.standard_normal(300)
    basis = RegressionBasis(3, 0.7)
    once = localized_least_squares(y, x, basis)
    twice = localized_least_squares(np.tile(y, 2), np.tile(x, 2), basis)
    np.testing.assert_allclose(twice, once, rtol=1e-12)


def test_distribution_basis_has_no_constant():
    assert RegressionBasis(2, 1.0, BasisKind.DISTRIBUTION).powers.tolist() == [1, 2]


def test_empty_window():
    with pytest.raises(EmptyWindowError):
        localized_least_squares([1.0, 2.0], [3.0, 4.0], RegressionBasis(1, 0.5))


@settings(max_examples=40)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_normal_equations_match_orthogonal_solver(seed, m):
    rng = np.random.RandomState(seed)
    x = rng.uniform(-1, 1, 200)
    design = np.power.outer(x, np.arange(m))
    y = rng.standard_normal(200)
    assert np.linalg.cond(design) < 1e6
    reference = np.linalg.lstsq(design, y, rcond=None)[0]
    np.testing.assert_allclose(solve_normal_equations(design, y), reference, rtol=1e-8, atol=1e-12)


@settings(max_examples=30)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_intercept_weights_reproduce_regression(seed, m):
    rng = np.random.RandomState(seed)
    x, y = rng.uniform(-1, 1, 500), rng.standard_normal(500)
    weights = intercept_weights(x, 0.6, m)
    assert np.all(weights[np.abs(x) >= 0.6] == 0)
    coeffs = localized_least_squares(y, x, RegressionBasis(m, 0.6))
    assert weights @ y == pytest.approx(coeffs[0], rel=1e-9, abs=1e-12)


def test_fits_are_deterministic():
    x = np.random.RandomState(5).standard_normal(50_000)
    a = fit_density(empirical_density_samples(x, 0.2), 2)
    b = fit_density(empirical_density_samples(x.copy(), 0.2), 2)
    assert a == b
    assert fit_distribution(x, 0.2) == fit_distribution(x.copy(), 0.2)
