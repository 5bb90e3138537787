import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochad.errors import DomainError, LengthMismatchError
from stochad.randomvar import RandomVariable, expectation, indicator, standard_deviation, variance

finite = st.floats(-1e3, 1e3, allow_nan=False)
samples = st.lists(finite, min_size=1, max_size=50)


def test_componentwise_add():
    z = RandomVariable([1, 2, 3]) + RandomVariable([4, 5, 6])
    assert list(z.values) == [5, 7, 9]


def test_scalar_zero_annihilates():
    assert list((RandomVariable([1, 2, 3]) * 0).values) == [0, 0, 0]


def test_exp_of_zero():
    assert list(RandomVariable([0.0, 0.0]).exp().values) == [1.0, 1.0]


def test_indicator_tie_maps_to_zero():
    assert list(indicator(RandomVariable([-1, 0, 2])).values) == [0, 0, 1]
    assert list(indicator(RandomVariable([0.1, 2.0])).values) == [1, 1]
    assert list(indicator(RandomVariable([-0.1, -2.0])).values) == [0, 0]


@pytest.mark.parametrize("values, mean", [([1, 2, 3, 4], 2.5), ([7.0], 7.0)])
def test_expectation(values, mean):
    assert expectation(RandomVariable(values)) == mean


def test_expectation_of_constant_and_indicator():
    assert RandomVariable.constant(3.25).expectation() == 3.25
    assert indicator(RandomVariable([-1.0, 1.0])).expectation() == 0.5


@pytest.mark.parametrize("values, var", [([1, 1, 1], 0.0), ([0, 2], 1.0), ([1, 2, 3, 4], 1.25)])
def test_population_variance(values, var):
    assert variance(RandomVariable(values)) == var


def test_standard_deviation():
    assert standard_deviation(RandomVariable([0, 2])) == 1.0


def test_variance_needs_two_samples():
    with pytest.raises(ValueError):
        RandomVariable([1.0]).variance()


def test_length_mismatch():
    with pytest.raises(LengthMismatchError):
        RandomVariable([1, 2]) + RandomVariable([1, 2, 3])


@pytest.mark.parametrize("op", [lambda x: (x - 1.0).log(), lambda x: (-x).sqrt(), lambda x: 1.0 / (x - 1.0)])
def test_domain_errors(op):
    with pytest.raises(DomainError):
        op(RandomVariable([1.0, 2.0]))


def test_non_finite_input_rejected():
    with pytest.raises(DomainError):
        RandomVariable([1.0, math.nan])


def test_values_are_read_only():
    buf = np.array([1.0, 2.0])
    rv = RandomVariable(buf)
    buf[0] = 5.0
    assert rv.values[0] == 1.0
    with pytest.raises(ValueError):
        rv.values[0] = 3.0


@settings(max_examples=60)
@given(st.data(), finite, finite)
def test_linearity_of_expectation(data, a, b):
    n = data.draw(st.integers(1, 40))
    xs = data.draw(st.lists(finite, min_size=n, max_size=n))
    ys = data.draw(st.lists(finite, min_size=n, max_size=n))
    x, y = RandomVariable(xs), RandomVariable(ys)
    lhs = (x * a + y * b).expectation()
    rhs = a * x.expectation() + b * y.expectation()
    scale = max(1.0, abs(a) * np.abs(xs).max() + abs(b) * np.abs(ys).max())
    assert abs(lhs - rhs) <= 1e-12 * scale


@given(samples)
def test_indicator_is_binary(xs):
    ind = indicator(RandomVariable(xs))
    assert set(np.unique(ind.values)) <= {0.0, 1.0}
    assert 0.0 <= ind.expectation() <= 1.0


@given(samples, finite)
def test_broadcast_matches_constant_vector(xs, c):
    x = RandomVariable(xs)
    full = RandomVariable(np.full(len(xs), c))
    for op in (lambda a, b: a + b, lambda a, b: a - b, lambda a, b: a * b,
               lambda a, b: a.maximum(b)):
        np.testing.assert_array_equal(op(x, c).values, op(x, full).values)


def test_repeated_reductions_are_identical():
    x = RandomVariable(np.random.RandomState(4).standard_normal(100_001))
    assert x.expectation() == x.expectation()
    assert x.variance() == RandomVariable(np.array(x.values)).variance()
