import numpy as np
import pytest

from ordlasso.autoregress import (ArFit, ar_least_squares, fit_ar_ols_aic, fit_ar_ordered,
                                  simulate_ar, simulate_table1)
from ordlasso.solver import Dataset, FitConfig, center, fit_ordered_lasso
from ordlasso.timelag import build_rolling_design


def test_aic_picks_order_one_for_ar1():
    hits = 0
    for seed in range(10):
        x = simulate_ar(np.random.default_rng(seed), beta=(0.8,), sigma=1.0, length=2000)
        hits += fit_ar_ols_aic(x, 10).selected_order == 1
    assert hits >= 8


def test_nested_rss_decreases(rng):
    x = simulate_ar(rng, length=300)
    rss = [ar_least_squares(x, k, 8)[2] for k in range(9)]
    assert np.all(np.diff(rss) <= 1e-9 * rss[0])


def test_aic_criterion_form(rng):
    x = simulate_ar(rng, length=300)
    fit = fit_ar_ols_aic(x, 6)
    M = x.size - 6
    k = fit.selected_order
    rss = ar_least_squares(x, k, 6)[2]
    assert fit.criterion[k] == pytest.approx(M * np.log(rss / M) + 2 * k)
    assert fit.criterion[k] == fit.criterion.min()
    assert np.all(fit.coefficients[k:] == 0)


def test_noise_series_selects_order_zero():
    zeros = sum(fit_ar_ordered(np.random.default_rng(s).normal(size=300), 10).selected_order == 0
                for s in range(10))
    assert zeros >= 8


def test_ordered_fit_is_training_half_fit(backend, rng):
    x = simulate_ar(rng, length=400)
    fit = fit_ar_ordered(x, 8)
    design, y = build_rolling_design(x, 8)
    half = y.size // 2
    data = center(Dataset(design.Z[:half], y[:half]))
    direct = fit_ordered_lasso(data, FitConfig(fit.lam))
    np.testing.assert_allclose(fit.coefficients, direct.coef, atol=1e-4)
    assert direct.coefficients.is_feasible()


def test_selected_order_is_effective_lag(rng):
    x = simulate_ar(rng, length=400)
    fit = fit_ar_ordered(x, 8, rule="min")
    nz = np.flatnonzero(np.abs(fit.coefficients) > 1e-8)
    assert fit.selected_order == (nz[-1] + 1 if nz.size else 0)


def test_lasso_variant(rng):
    fit = fit_ar_ordered(simulate_ar(rng, length=400), 8, monotone=False)
    assert fit.method == "lasso"


def test_short_series_rejected():
    with pytest.raises(ValueError, match="too short"):
        fit_ar_ols_aic(np.arange(10.0), 5)
    with pytest.raises(ValueError):
        fit_ar_ordered(np.arange(30.0), 0)


def test_arfit_order_bounds():
    with pytest.raises(ValueError):
        ArFit("ols-aic", np.zeros(3), 4)


def test_simulation_is_reproducible_and_parallel_safe():
    a = simulate_table1(6, seed=3)
    b = simulate_table1(6, seed=3, n_jobs=2)
    np.testing.assert_array_equal(a["orders"], b["orders"])
    assert a["ols-aic"].sum() == 6 and a["ordered-lasso"].size == 11
