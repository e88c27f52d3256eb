"""Regularization paths, cross-validation and degrees of freedom."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ordlasso.solver import (Dataset, FitConfig, OrderedLassoFit,
                             SplitCoefficients, center, fit_ordered_lasso)
from ordlasso.timelag import BlockFit, fit_static

log = logging.getLogger(__name__)

PLATEAU_ATOL = 1e-8
NULL_ATOL = 1e-10


@dataclass(frozen=True)
class LambdaPath:
    lambdas: np.ndarray
    fits: list
    top_is_null: bool = True

    def __post_init__(self):
        lambdas = np.asarray(self.lambdas, dtype=float)
        if lambdas.size != len(self.fits):
            raise ValueError("one fit per lambda is required")
        if np.any(np.diff(lambdas) >= 0):
            raise ValueError("lambdas must be strictly decreasing")
        object.__setattr__(self, "lambdas", lambdas)

    def __len__(self):
        return len(self.fits)

    def coefs(self):
        """``n_lambdas x n_coef`` matrix of effective coefficients."""
        return np.vstack([_flat_coef(f) for f in self.fits])


@dataclass(frozen=True)
class DfEstimate:
    plateau_count: int
    lam: float
    per_block: list = field(default_factory=list)
    nonzero_count: int = 0


@dataclass(frozen=True)
class CVResult:
    lambdas: np.ndarray
    cv_error: np.ndarray
    fold_errors: np.ndarray
    best_index: int

    @property
    def best_lambda(self):
        return float(self.lambdas[self.best_index])


def _flat_coef(fit):
    if isinstance(fit, BlockFit):
        return fit.split.coef
    return fit.coef


def _blocks_of(fit):
    if isinstance(fit, BlockFit):
        return [b.coef for b in fit.blocks]
    if isinstance(fit, OrderedLassoFit):
        return [fit.coef]
    if isinstance(fit, SplitCoefficients):
        return [fit.coef]
    return [np.asarray(r, dtype=float) for r in np.atleast_2d(fit)]


def count_plateaus(values, atol=PLATEAU_ATOL):
    """Maximal runs of equal consecutive non-zero magnitudes."""
    mags = np.abs(np.asarray(values, dtype=float).ravel())
    count = 0
    prev = None
    for m in mags:
        if m <= atol:
            prev = None
            continue
        if prev is None or abs(m - prev) > atol:
            count += 1
        prev = m
    return count


def df_plateaus(fit, atol=PLATEAU_ATOL) -> DfEstimate:
    """Non-zero plateau count, the unbiased df estimate for the ordered lasso.

    Blocks of a lagged fit are counted separately and summed. A plain
    coefficient vector (or ``p x K`` matrix) is accepted too.
    """
    blocks = _blocks_of(fit)
    per_block = [count_plateaus(b, atol) for b in blocks]
    nonzero = int(sum(np.sum(np.abs(b) > atol) for b in blocks))
    lam = float(getattr(fit, "lam", np.nan))
    return DfEstimate(int(sum(per_block)), lam, per_block, nonzero)


def lambda_max(data: Dataset) -> float:
    """``max_j |x_j' y|``; every coefficient is zero at or above it."""
    return float(np.max(np.abs(data.X.T @ data.y)))


def lambda_grid(lam_max, n_lambdas=100, ratio=1e-3):
    if n_lambdas < 2:
        raise ValueError("n_lambdas must be at least 2")
    if not lam_max > 0:
        raise ValueError("lambda_max must be positive (is the response constant?)")
    return np.geomspace(lam_max, ratio * lam_max, n_lambdas)


def _fit_one(data, cfg, warm, K, first_lag):
    if K is None:
        return fit_ordered_lasso(data, cfg, warm)
    return fit_static(data, K, cfg, warm, first_lag=first_lag)


def _warm_of(fit, K):
    if fit is None:
        return None
    return fit.blocks if K is not None else fit.coefficients


def lambda_path(data: Dataset, n_lambdas=100, cfg: FitConfig | None = None, *,
                K=None, lambdas=None, ratio=1e-3, first_lag=1) -> LambdaPath:
    """Warm-started fits along a decreasing lambda grid.

    The grid runs log-spaced from ``lambda_max`` down to ``ratio`` times it,
    unless ``lambdas`` is given. With ``K`` set, the design is treated as a
    lag layout and each point is a blockwise fit.
    """
    if not data.centered:
        data = center(data)
    cfg = cfg or FitConfig(0.0)
    if lambdas is None:
        lambdas = lambda_grid(lambda_max(data), n_lambdas, ratio)
    lambdas = np.asarray(lambdas, dtype=float)
    fits = []
    prev = None
    for lam in lambdas:
        prev = _fit_one(data, cfg.with_lam(float(lam)), _warm_of(prev, K), K,
                        first_lag)
        fits.append(prev)
    # rounding in blockwise partial residuals can leave ~1e-14 at lambda_max
    top_null = bool(np.all(np.abs(_flat_coef(fits[0])) <= NULL_ATOL))
    if not top_null:
        log.warning("fit at the largest lambda %.4g is not empty", lambdas[0])
    return LambdaPath(lambdas, fits, top_null)


def contiguous_folds(n, folds):
    """Fold labels ``0..folds-1`` over ``n`` rows in contiguous segments."""
    if folds < 2:
        raise ValueError("need at least 2 folds")
    edges = np.linspace(0, n, folds + 1).round().astype(int)
    if np.any(np.diff(edges) < 2):
        raise ValueError(f"{n} rows are too few for {folds} folds of >= 2 rows")
    labels = np.empty(n, dtype=int)
    for k in range(folds):
        labels[edges[k]:edges[k + 1]] = k
    return labels


def _squared_errors(path: LambdaPath, X_val, y_val):
    X_val = np.asarray(X_val, dtype=float)
    y_val = np.asarray(y_val, dtype=float)
    return np.array([(y_val - f.intercept - X_val @ _flat_coef(f)) ** 2
                     for f in path.fits])


def validation_errors(path: LambdaPath, X_val, y_val):
    """Mean squared prediction error of every path fit on held-out rows."""
    return _squared_errors(path, X_val, y_val).mean(axis=1)


def select_index(errors, se=None, rule="min"):
    """Index of the chosen lambda on a decreasing grid.

    ``rule="min"`` takes the smallest error (ties to the larger lambda).
    ``rule="1se"`` takes the largest lambda whose error is within one
    standard error of the minimum, ``se`` being the standard errors.
    """
    errors = np.asarray(errors, dtype=float)
    best = int(np.flatnonzero(errors == errors.min())[0])
    if rule == "min":
        return best
    if rule != "1se":
        raise ValueError(f"unknown selection rule {rule!r}")
    if se is None:
        raise ValueError("the 1se rule needs standard errors")
    return int(np.flatnonzero(errors <= errors[best] + se[best])[0])


def cross_validate(X, y, folds=2, cfg: FitConfig | None = None, *,
                   n_lambdas=100, lambdas=None, K=None, contiguous=True,
                   labels=None, seed=None, first_lag=1, rule="min") -> CVResult:
    """K-fold cross-validation over a common lambda grid.

    Folds are contiguous segments by default (time-ordered data); set
    ``contiguous=False`` for shuffled folds drawn with ``seed``, or pass fold
    ``labels`` directly. Each training split is centered on its own means.
    The selected lambda minimizes mean validation error, ties going to the
    larger lambda; ``rule="1se"`` uses the fold-to-fold standard error.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float).ravel()
    n = y.size
    if labels is None:
        labels = contiguous_folds(n, folds)
        if not contiguous:
            labels = np.random.default_rng(seed).permutation(labels)
    labels = np.asarray(labels)
    uniq = np.unique(labels)
    if uniq.size < 2:
        raise ValueError("need at least 2 folds")
    for k in uniq:
        if np.sum(labels == k) < 2:
            raise ValueError("every fold needs at least 2 rows")
    if lambdas is None:
        lambdas = lambda_grid(lambda_max(center(Dataset(X, y))), n_lambdas)
    lambdas = np.asarray(lambdas, dtype=float)
    errs = np.empty((uniq.size, lambdas.size))
    for i, k in enumerate(uniq):
        train = labels != k
        data = center(Dataset(X[train], y[train]))
        path = lambda_path(data, cfg=cfg, K=K, lambdas=lambdas,
                           first_lag=first_lag)
        errs[i] = validation_errors(path, X[~train], y[~train])
    cv = errs.mean(axis=0)
    se = errs.std(axis=0, ddof=1) / np.sqrt(uniq.size)
    return CVResult(lambdas, cv, errs, select_index(cv, se, rule))


def holdout_select(train: Dataset, X_val, y_val, cfg: FitConfig | None = None, *,
                   n_lambdas=100, lambdas=None, K=None, first_lag=1, rule="min"):
    """Fit a path on ``train`` and pick lambda by error on a validation set.

    With ``rule="1se"`` the standard error of each mean is taken over the
    validation rows. Returns ``(path, errors, best_index)``.
    """
    if not train.centered:
        train = center(train)
    path = lambda_path(train, n_lambdas, cfg, K=K, lambdas=lambdas,
                       first_lag=first_lag)
    sq = _squared_errors(path, X_val, y_val)
    errs = sq.mean(axis=1)
    se = sq.std(axis=1, ddof=1) / np.sqrt(sq.shape[1]) if sq.shape[1] > 1 else None
    return path, errs, select_index(errs, se, rule)


def df_monte_carlo(X, mu, sigma, lam, n_reps=2000, seed=0, cfg=None):
    """Compare the mean plateau count with covariance degrees of freedom.

    Draws ``y = mu + sigma * eps`` and fits at ``lam``. With the true mean
    known, ``sum_i Cov(y_i, yhat_i) / sigma^2`` is estimated without bias by
    the replicate average of ``eps' yhat / sigma``; differencing it with the
    plateau count replicate by replicate gives the paired standard error.

    Returns a dict with ``mean_plateaus``, ``cov_df``, ``diff``, ``se``.
    """
    X = np.asarray(X, dtype=float)
    mu = np.asarray(mu, dtype=float)
    rng = np.random.default_rng(seed)
    cfg = (cfg or FitConfig(lam)).with_lam(lam)
    k_hat = np.empty(n_reps)
    cov_terms = np.empty(n_reps)
    for r in range(n_reps):
        eps = rng.standard_normal(mu.size)
        y = mu + sigma * eps
        fit = fit_ordered_lasso(center(Dataset(X, y)), cfg)
        yhat = fit.intercept + X @ fit.coef
        # the intercept contributes exactly 1 df; count it on both sides
        k_hat[r] = df_plateaus(fit).plateau_count + 1
        cov_terms[r] = eps @ yhat / sigma
    d = cov_terms - k_hat
    return {
        "mean_plateaus": float(k_hat.mean() - 1),
        "cov_df": float(cov_terms.mean() - 1),
        "diff": float(d.mean()),
        "se": float(d.std(ddof=1) / np.sqrt(n_reps)),
    }
