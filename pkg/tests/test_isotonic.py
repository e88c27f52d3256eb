import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import isotonic_enum, near_iso_qp
from ordlasso.isotonic import (NearIsoConfig, WeightedSequence, near_iso,
                               near_iso_objective, pava_nonincreasing, plateaus)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
sequences = st.lists(finite, min_size=1, max_size=40)


def test_already_nonincreasing_is_identity(backend):
    fit = pava_nonincreasing([3.0, 2.0, 1.0])
    np.testing.assert_array_equal(fit.fitted, [3, 2, 1])
    assert fit.n_plateaus == 3


def test_single_violation_pools(backend):
    fit = pava_nonincreasing([1.0, 3.0])
    np.testing.assert_array_equal(fit.fitted, [2, 2])
    assert fit.plateaus == [(0, 2, 2.0)]


def test_empty_sequence_rejected():
    with pytest.raises(ValueError, match="empty sequence"):
        pava_nonincreasing([])


@pytest.mark.parametrize("weights", [[1.0, 0.0], [1.0, -2.0], [1.0]])
def test_bad_weights_rejected(weights):
    with pytest.raises(ValueError):
        WeightedSequence([1.0, 2.0], weights)


def test_matches_enumeration_oracle(backend, rng):
    for _ in range(200):
        n = rng.integers(1, 9)
        y = rng.normal(size=n) * 3
        w = rng.uniform(0.2, 3.0, size=n)
        np.testing.assert_allclose(pava_nonincreasing(y).fitted,
                                   isotonic_enum(y), atol=1e-8)
        np.testing.assert_allclose(pava_nonincreasing(y, w).fitted,
                                   isotonic_enum(y, w), atol=1e-8)


def test_plateau_values_are_weighted_means(backend, rng):
    y = rng.normal(size=50)
    w = rng.uniform(0.5, 2.0, size=50)
    fit = pava_nonincreasing(y, w)
    covered = 0
    for start, end, value in fit.plateaus:
        assert start == covered
        covered = end
        np.testing.assert_allclose(value, np.average(y[start:end], weights=w[start:end]),
                                   rtol=1e-12, atol=1e-12)
        assert np.all(fit.fitted[start:end] == value)
    assert covered == y.size
    vals = [v for _, _, v in fit.plateaus]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@settings(max_examples=200, deadline=None)
@given(sequences)
def test_pava_properties(values):
    y = np.array(values)
    fit = pava_nonincreasing(y)
    assert np.all(np.diff(fit.fitted) <= 0)
    again = pava_nonincreasing(fit.fitted)
    np.testing.assert_array_equal(again.fitted, fit.fitted)
    assert math.isclose(fit.fitted.sum(), y.sum(), rel_tol=1e-12,
                        abs_tol=1e-9 * max(1.0, np.abs(y).sum()))


def test_near_iso_theta_zero_is_identity(backend, rng):
    y = rng.normal(size=12)
    np.testing.assert_array_equal(near_iso(y, 0.0).fitted, y)


def test_near_iso_infinite_theta_is_pava(backend):
    np.testing.assert_array_equal(near_iso([1.0, 3.0]).fitted, [2.0, 2.0])
    np.testing.assert_array_equal(near_iso([1.0, 3.0], NearIsoConfig(math.inf)).fitted,
                                  [2.0, 2.0])


def test_near_iso_two_points():
    # for (1, 3) the up-jump shrinks by 2*theta until it closes at theta = 1
    np.testing.assert_allclose(near_iso([1.0, 3.0], 0.5).fitted, [1.5, 2.5], atol=1e-12)
    np.testing.assert_allclose(near_iso([1.0, 3.0], 0.5).fitted,
                               near_iso_qp([1.0, 3.0], 0.5), atol=1e-7)
    np.testing.assert_allclose(near_iso([1.0, 3.0], 1.0).fitted, [2.0, 2.0], atol=1e-12)


def test_near_iso_rejects_negative_theta():
    with pytest.raises(ValueError):
        near_iso([1.0, 2.0], -0.1)


def test_near_iso_matches_qp(backend, rng):
    for _ in range(25):
        n = rng.integers(2, 15)
        y = rng.normal(size=n) * 2
        w = rng.uniform(0.3, 2.0, size=n)
        theta = float(rng.choice([0.05, 0.3, 1.0, 4.0]))
        got = near_iso(y, theta, w).fitted
        ref = near_iso_qp(y, theta, w)
        np.testing.assert_allclose(got, ref, atol=1e-6)
        assert (near_iso_objective(y, got, theta, w)
                <= near_iso_objective(y, ref, theta, w) + 1e-9)


@settings(max_examples=100, deadline=None)
@given(sequences, st.floats(0, 50))
def test_near_iso_beats_input_and_pava(values, theta):
    y = np.array(values)
    fit = near_iso(y, theta).fitted
    obj = near_iso_objective(y, fit, theta)
    slack = 1e-9 * (1 + np.abs(y).sum())
    assert obj <= near_iso_objective(y, y, theta) + slack
    assert obj <= near_iso_objective(y, pava_nonincreasing(y).fitted, theta) + slack


def test_plateau_reader_tolerance():
    assert plateaus([3, 3, 1, 0, 0]) == [(0, 2, 3.0), (2, 3, 1.0), (3, 5, 0.0)]
    assert len(plateaus([1.0, 1.0 + 1e-12])) == 1
    assert len(plateaus([1.0, 1.0 + 1e-12], rtol=0.0)) == 2
