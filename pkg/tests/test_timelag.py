import numpy as np
import pytest

from _oracles import ordered_lasso_qp
from ordlasso import descent
from ordlasso.solver import Dataset, FitConfig, SplitCoefficients, center, fit_ordered_lasso
from ordlasso.timelag import (BlockFit, LagSpec, build_rolling_design, effective_lags,
                              fit_rolling, fit_static, rolling_dataset)


def test_univariate_rows():
    design, y = build_rolling_design([1.0, 2.0, 3.0, 4.0], 2)
    np.testing.assert_array_equal(design.Z, [[2, 1], [3, 2]])
    np.testing.assert_array_equal(y, [3, 4])
    assert design.dropped_rows == 2 and design.origin == "rolling"


def test_single_lag_is_a_shift():
    x = np.arange(10.0).reshape(5, 2)
    design, y = build_rolling_design(x, LagSpec(2, 1), response=np.arange(5.0))
    np.testing.assert_array_equal(design.Z, x[:-1])
    np.testing.assert_array_equal(y, np.arange(1.0, 5.0))


@pytest.mark.parametrize("first_lag", [0, 1, 3])
def test_index_identity(rng, first_lag):
    N, p, K = 17, 3, 4
    x = rng.normal(size=(N, p))
    spec = LagSpec(p, K, first_lag)
    design, _ = build_rolling_design(x, spec, response=np.zeros(N))
    for r, t in enumerate(range(spec.max_lag, N)):
        for j in range(p):
            for k in range(K):
                assert design.Z[r, j * K + k] == x[t - (first_lag + k), j]


def test_short_series_rejected():
    with pytest.raises(ValueError, match="series shorter than maximum lag"):
        build_rolling_design([1.0, 2.0], 2)
    with pytest.raises(ValueError):
        LagSpec(0, 3)


def test_multivariate_needs_response(rng):
    design, y = build_rolling_design(rng.normal(size=(8, 2)), 2)
    assert y is None
    with pytest.raises(ValueError):
        rolling_dataset(rng.normal(size=(8, 2)), 2)


def test_effective_lags():
    assert effective_lags(np.array([[2.1, 0.5, 0, 0, 0]])) == [2]
    assert effective_lags(np.zeros((1, 5))) == [0]
    fit = BlockFit([SplitCoefficients([1, 1, 0], [0, 0, 0]),
                    SplitCoefficients([0, 0, 0], [2, 1, 0.5])], 0.0, 1.0, 0.0, 1, True, 3)
    assert effective_lags(fit) == [2, 3]


def _lagged_problem(rng, n, p, K):
    X = rng.normal(size=(n, p * K))
    beta = np.concatenate([np.sort(rng.uniform(0, 2, K))[::-1] * rng.choice([-1, 1])
                           for _ in range(p)])
    return center(Dataset(X, X @ beta + rng.normal(size=n)))


def test_single_block_equals_plain_fit(backend, rng):
    d = _lagged_problem(rng, 25, 1, 6)
    a = fit_static(d, 6, FitConfig(0.7))
    b = fit_ordered_lasso(d, FitConfig(0.7))
    np.testing.assert_array_equal(a.split.coef, b.coef)
    assert a.intercept == b.intercept


def test_rolling_single_block_equals_plain_fit(backend, rng):
    x = rng.normal(size=80).cumsum() * 0.1 + rng.normal(size=80)
    fit = fit_rolling(x, 5, FitConfig(1.0))
    design, y = build_rolling_design(x, 5)
    plain = fit_ordered_lasso(center(Dataset(design.Z, y)), FitConfig(1.0))
    np.testing.assert_allclose(fit.coef.ravel(), plain.coef, atol=1e-10, rtol=0)


def test_orthogonal_blocks_match_independent_fits(backend, rng):
    Q, _ = np.linalg.qr(rng.normal(size=(30, 12)))
    Q -= Q.mean(axis=0)
    Q, _ = np.linalg.qr(Q)
    y = Q @ rng.normal(size=12) * 3 + rng.normal(size=30)
    d = center(Dataset(Q, y))
    fit = fit_static(d, 4, FitConfig(0.3))
    assert fit.cycles <= 2  # the second cycle only confirms convergence
    for j in range(3):
        s = slice(4 * j, 4 * j + 4)
        single = fit_ordered_lasso(center(Dataset(d.X[:, s], d.y)), FitConfig(0.3))
        # both runs stop on objective change, so coefficients agree to ~1e-5
        np.testing.assert_allclose(fit.blocks[j].coef, single.coef, atol=1e-4)


def test_matches_block_qp(backend, rng):
    for _ in range(4):
        d = _lagged_problem(rng, 20, 3, 4)
        fit = fit_static(d, 4, FitConfig(0.4), tol=1e-10)
        ref, _ = ordered_lasso_qp(d.X, d.y, 0.4, K=4)
        assert fit.objective <= ref + 1e-5
        assert fit.is_feasible()


def test_noise_series_zero_above_threshold(backend, rng):
    x = rng.normal(size=200)
    design, data = rolling_dataset(x, 6)
    c = data.X.T @ data.y
    prefix = np.abs(np.cumsum(c) / np.arange(1, 7))
    lam0 = prefix.max()  # smallest penalty at which zero is optimal
    above = fit_rolling(x, 6, FitConfig(1.01 * lam0))
    assert np.all(above.coef == 0)
    below = fit_rolling(x, 6, FitConfig(0.95 * lam0))
    assert np.any(below.coef != 0)


def test_block_updates_recorded(rng):
    d = _lagged_problem(rng, 40, 3, 5)
    before = descent.stats().get("block-coordinate", {"checks": 0})["checks"]
    fit = fit_static(d, 5, FitConfig(0.5))
    assert descent.stats()["block-coordinate"]["checks"] >= before + 3 * fit.cycles
    assert descent.stats()["block-coordinate"]["violations"] == 0


def test_layout_errors(rng):
    d = _lagged_problem(rng, 10, 2, 3)
    with pytest.raises(ValueError, match="multiple"):
        fit_static(d, 4, FitConfig(0.1))
    with pytest.raises(ValueError, match="warm start"):
        fit_static(d, 3, FitConfig(0.1), warm=[SplitCoefficients.zeros(3)])
    with pytest.raises(ValueError, match="centered"):
        fit_static(Dataset(d.X + 1, d.y), 3, FitConfig(0.1))
