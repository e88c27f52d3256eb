"""Autoregressive order selection: ordered lasso versus least squares + AIC."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ordlasso.modelsel import holdout_select
from ordlasso.solver import Dataset, FitConfig, center
from ordlasso.timelag import LagSpec, build_rolling_design, effective_lags

log = logging.getLogger(__name__)

ORDER_TOL = 1e-8

# Table 1 generator
TABLE1_BETA = (0.35, 0.25, 0.25)
TABLE1_SIGMA = 4.0
TABLE1_LENGTH = 1000
TABLE1_MAX_LAG = 10
TABLE1_BURN_IN = 100


@dataclass(frozen=True)
class ArFit:
    method: str
    coefficients: np.ndarray
    selected_order: int
    validation_error: float = float("nan")
    lam: float | None = None
    intercept: float = 0.0
    criterion: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        coefs = np.asarray(self.coefficients, dtype=float)
        object.__setattr__(self, "coefficients", coefs)
        if not 0 <= self.selected_order <= coefs.size:
            raise ValueError("selected order outside 0..K")

    @property
    def K(self):
        return self.coefficients.size


def _check_series(series, K):
    x = np.asarray(series, dtype=float).ravel()
    if K < 1:
        raise ValueError("maximum lag must be at least 1")
    if x.size <= 2 * K:
        raise ValueError(f"series of length {x.size} is too short for maximum "
                         f"lag {K} (need more than {2 * K} points)")
    return x


def _split_rows(M):
    half = M // 2
    return slice(0, half), slice(half, M)


def fit_ar_ordered(series, K, cfg: FitConfig | None = None, *, n_lambdas=100,
                   monotone=True, rule="1se") -> ArFit:
    """AR fit by the ordered lasso with lambda picked on a temporal holdout.

    The lag design is split into its first and second halves; a warm-started
    path is fit on the first and scored by squared prediction error on the
    second. Coefficients and order come from the first-half fit at the chosen
    lambda. ``monotone=False`` gives the plain lasso AR fit.

    Parameters
    ----------
    rule : {"1se", "min"}
        ``"1se"`` takes the largest lambda within one standard error of the
        smallest validation error; ``"min"`` the minimizer itself. Validation
        curves for AR order are flat near the minimum, and the minimizer
        tends to keep spurious distant lags.
    """
    x = _check_series(series, K)
    design, y = build_rolling_design(x, LagSpec(1, K))
    train, val = _split_rows(y.size)
    base = cfg or FitConfig(0.0)
    base = FitConfig(0.0, base.max_iter, base.tol, base.theta,
                     base.backtrack_shrink, base.initial_step, monotone)
    data = center(Dataset(design.Z[train], y[train]))
    path, errs, best = holdout_select(data, design.Z[val], y[val], base,
                                      n_lambdas=n_lambdas, rule=rule)
    fit = path.fits[best]
    order = effective_lags(fit.coef[None, :], tol=ORDER_TOL)[0]
    return ArFit("ordered-lasso" if monotone else "lasso", fit.coef, order,
                 float(errs[best]), float(path.lambdas[best]), fit.intercept,
                 errs)


def ar_least_squares(x, k, K):
    """OLS AR(k) with intercept on the common sample ``t = K .. N-1``.

    Returns ``(intercept, coefficients, rss)``; raises LinAlgError when the
    design is rank deficient.
    """
    rows = np.arange(K, x.size)
    A = np.column_stack([np.ones(rows.size)] + [x[rows - l] for l in range(1, k + 1)])
    if np.linalg.matrix_rank(A) < A.shape[1]:
        raise np.linalg.LinAlgError(f"singular AR({k}) design")
    beta, *_ = np.linalg.lstsq(A, x[rows], rcond=None)
    r = x[rows] - A @ beta
    return float(beta[0]), beta[1:], float(r @ r)


def fit_ar_ols_aic(series, K) -> ArFit:
    """Least-squares AR with order chosen by AIC = M log(RSS/M) + 2k.

    Every order ``k = 0..K`` is fit on the same ``M = N - K`` rows so the
    criteria are comparable; ties go to the smaller order. Orders whose
    design is singular are skipped.
    """
    x = _check_series(series, K)
    M = x.size - K
    aic = np.full(K + 1, np.inf)
    fits = {}
    for k in range(K + 1):
        try:
            fits[k] = ar_least_squares(x, k, K)
        except np.linalg.LinAlgError:
            log.warning("skipping AR(%d): singular design", k)
            continue
        rss = fits[k][2]
        aic[k] = M * np.log(rss / M) + 2 * k if rss > 0 else -np.inf
    if not np.isfinite(aic).any() and not np.isneginf(aic).any():
        raise ValueError("no AR order could be fit")
    order = int(np.flatnonzero(aic == aic.min())[0])
    b0, beta, rss = fits[order]
    coefs = np.zeros(K)
    coefs[:order] = beta
    return ArFit("ols-aic", coefs, order, rss / M, None, b0, aic)


def simulate_ar(rng, beta=TABLE1_BETA, sigma=TABLE1_SIGMA, length=TABLE1_LENGTH,
                burn_in=TABLE1_BURN_IN):
    """``y_i = sum_k beta_k y_{i-k} + sigma * Z_i`` after discarding burn-in."""
    beta = np.asarray(beta, dtype=float)
    q = beta.size
    total = length + burn_in
    noise = sigma * rng.standard_normal(total)
    y = np.zeros(total)
    for i in range(total):
        acc = noise[i]
        for k in range(1, min(q, i) + 1):
            acc += beta[k - 1] * y[i - k]
        y[i] = acc
    return y[burn_in:]


def _table1_replicate(seed_seq, K, n_lambdas):
    rng = np.random.default_rng(seed_seq)
    y = simulate_ar(rng)
    return (fit_ar_ols_aic(y, K).selected_order,
            fit_ar_ordered(y, K, n_lambdas=n_lambdas).selected_order)


def simulate_table1(n_sims=100, seed=0, *, K=TABLE1_MAX_LAG, n_lambdas=50,
                    n_jobs=1):
    """Order-selection histogram over replicated AR(3) series.

    Returns a dict mapping ``"ols-aic"`` and ``"ordered-lasso"`` to integer
    arrays of length ``K + 1`` (index = selected order, 0 included) plus the
    raw per-replicate ``"orders"``.
    """
    if n_sims < 1:
        raise ValueError("n_sims must be at least 1")
    seeds = np.random.SeedSequence(seed).spawn(n_sims)
    if n_jobs == 1:
        results = [_table1_replicate(s, K, n_lambdas) for s in seeds]
    else:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_table1_replicate, seeds, [K] * n_sims,
                                    [n_lambdas] * n_sims))
    orders = np.array(results, dtype=int)
    hist = {
        "ols-aic": np.bincount(orders[:, 0], minlength=K + 1),
        "ordered-lasso": np.bincount(orders[:, 1], minlength=K + 1),
    }
    hist["orders"] = orders
    return hist
