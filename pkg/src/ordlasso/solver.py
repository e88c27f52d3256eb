"""The ordered lasso on one ordered block of coefficients.

Solves

    minimize 0.5 * ||y - X (b+ - b-)||^2 + lam * sum(b+ + b-)
    subject to b+_1 >= ... >= b+_p >= 0,  b-_1 >= ... >= b-_p >= 0

by alternating backtracked proximal-gradient steps on ``b+`` (with ``b-``
fixed) and on ``b-`` (with ``b+`` fixed). The prox is the PAVA shift-and-clip
map from :mod:`ordlasso.prox`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ordlasso import _backend, descent

CENTER_TOL = 1e-10


@dataclass(frozen=True)
class Dataset:
    """Design matrix and response, with the means removed by :func:`center`."""

    X: np.ndarray
    y: np.ndarray
    column_means: np.ndarray = None
    y_mean: float = 0.0
    centered: bool = False

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.y, dtype=float).ravel()
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError(f"X must be a non-empty N x p matrix, got {X.shape}")
        if y.shape[0] != X.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
        means = (np.zeros(X.shape[1]) if self.column_means is None
                 else np.asarray(self.column_means, dtype=float).ravel())
        if means.shape[0] != X.shape[1]:
            raise ValueError("column_means length must equal the column count")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "column_means", means)
        object.__setattr__(self, "y_mean", float(self.y_mean))

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    def is_centered(self, tol=CENTER_TOL):
        scale_x = max(1.0, float(np.abs(self.X).max()))
        scale_y = max(1.0, float(np.abs(self.y).max()))
        return (np.all(np.abs(self.X.mean(axis=0)) <= tol * scale_x)
                and abs(self.y.mean()) <= tol * scale_y)


def center(data: Dataset) -> Dataset:
    """Remove column means of X and the mean of y, keeping the means.

    Means accumulate, so centering an already-centered dataset is a no-op
    that preserves the stored means.
    """
    col = data.X.mean(axis=0)
    ym = data.y.mean()
    return Dataset(data.X - col, data.y - ym,
                   column_means=data.column_means + col,
                   y_mean=data.y_mean + ym, centered=True)


@dataclass(frozen=True)
class SplitCoefficients:
    """Non-negative, non-increasing halves with ``coef = plus - minus``."""

    plus: np.ndarray
    minus: np.ndarray

    def __post_init__(self):
        plus = np.asarray(self.plus, dtype=float).ravel()
        minus = np.asarray(self.minus, dtype=float).ravel()
        if plus.shape != minus.shape:
            raise ValueError("plus and minus must have the same length")
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)

    @classmethod
    def zeros(cls, p):
        return cls(np.zeros(p), np.zeros(p))

    @property
    def coef(self):
        return self.plus - self.minus

    @property
    def l1(self):
        return float(self.plus.sum() + self.minus.sum())

    def __len__(self):
        return self.plus.size

    def is_feasible(self):
        """Both halves non-negative and non-increasing (exact comparison)."""
        return all(np.all(h >= 0) and np.all(np.diff(h) <= 0)
                   for h in (self.plus, self.minus))


@dataclass(frozen=True)
class FitConfig:
    """Solver settings.

    ``monotone=False`` drops the order constraint, giving the plain lasso
    through the same machinery (used for baselines).
    """

    lam: float
    max_iter: int = 10_000
    tol: float = 1e-10
    theta: float | None = None
    backtrack_shrink: float = 0.5
    initial_step: float = 1.0
    monotone: bool = True

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"lambda must be non-negative, got {self.lam}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0 < self.backtrack_shrink < 1:
            raise ValueError("backtrack_shrink must lie in (0, 1)")
        if not self.initial_step > 0:
            raise ValueError("initial_step must be positive")
        if self.theta is not None and not self.theta >= 0:
            raise ValueError("theta must be non-negative")

    def with_lam(self, lam):
        return FitConfig(lam, self.max_iter, self.tol, self.theta,
                         self.backtrack_shrink, self.initial_step, self.monotone)

    @property
    def theta_value(self):
        return math.inf if self.theta is None else float(self.theta)


@dataclass(frozen=True)
class OrderedLassoFit:
    coefficients: SplitCoefficients
    intercept: float
    lam: float
    objective: float
    iterations: int
    converged: bool
    monotone_magnitudes: bool = field(init=False)

    def __post_init__(self):
        mags = np.abs(self.coefficients.coef)
        object.__setattr__(self, "monotone_magnitudes",
                           bool(np.all(np.diff(mags) <= 0)))

    @property
    def coef(self):
        return self.coefficients.coef

    @property
    def df(self):
        from ordlasso.modelsel import df_plateaus
        return df_plateaus(self).plateau_count


def objective(data: Dataset, coef: SplitCoefficients, lam: float) -> float:
    """0.5 * ||y - X (plus - minus)||^2 + lam * sum(plus + minus)."""
    if len(coef) != data.p:
        raise ValueError(
            f"coefficient length {len(coef)} does not match {data.p} columns")
    r = data.y - data.X @ coef.coef
    return float(0.5 * (r @ r) + lam * coef.l1)


def solve_gram(G, c, yy, cfg: FitConfig, warm: SplitCoefficients | None = None,
               kind="prox-gradient"):
    """Kernel entry point on ``(X'X, X'y, y'y)``; no centering requirement.

    Returns ``(SplitCoefficients, objective, iterations, converged)``; the
    objective is the Gram-form value tracked by the kernel.
    """
    p = len(c)
    if warm is None:
        bp, bm = np.zeros(p), np.zeros(p)
    else:
        if len(warm) != p:
            raise ValueError("warm start has the wrong length")
        bp, bm = warm.plus, warm.minus
    out = _backend.kernels().solve_block(
        G, c, float(yy), float(cfg.lam), bp, bm, int(cfg.max_iter),
        float(cfg.tol), float(cfg.initial_step), float(cfg.backtrack_shrink),
        cfg.theta_value, bool(cfg.monotone))
    bp, bm, F, iters, converged, n_checks, n_viol, worst = out
    descent.record(kind, n_checks, n_viol, worst)
    return SplitCoefficients(bp, bm), float(F), int(iters), bool(converged)


def fit_ordered_lasso(data: Dataset, cfg: FitConfig,
                      warm: SplitCoefficients | None = None) -> OrderedLassoFit:
    """Fit the ordered lasso to centered data.

    Parameters
    ----------
    data : Dataset
        Must be centered (see :func:`center`); the intercept is recovered from
        the stored means.
    cfg : FitConfig
    warm : SplitCoefficients, optional
        Starting point; zeros otherwise.
    """
    if not data.centered or not data.is_centered():
        raise ValueError("data must be centered; call center() first")
    X, y = data.X, data.y
    coef, _, iters, converged = solve_gram(X.T @ X, X.T @ y, y @ y, cfg, warm)
    intercept = data.y_mean - float(data.column_means @ coef.coef)
    return OrderedLassoFit(coef, intercept, float(cfg.lam),
                           objective(data, coef, cfg.lam), iters, converged)
