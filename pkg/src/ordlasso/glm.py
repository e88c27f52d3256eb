"""Ordered lasso for logistic regression by iteratively reweighted least squares.

Each outer step linearizes the log-likelihood at the current fit, giving the
working response ``z = eta + (y - p) / w`` with weights ``w = p (1 - p)``, and
solves the weighted ordered-lasso subproblem

    minimize 0.5 * sum_i w_i (z_i - b0 - x_i'b)^2 + lam * sum(b+ + b-)

by alternating an exact intercept update with ordered-lasso solves on the
row-scaled data ``sqrt(w) * X``. With ``K`` given the columns form lag
blocks and the subproblem is solved blockwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ordlasso import descent
from ordlasso.solver import FitConfig, SplitCoefficients, solve_gram

PROB_CLIP = 1e-5


@dataclass(frozen=True)
class IrlsState:
    """Quadratic approximation at the current parameters."""

    z: np.ndarray
    p: np.ndarray
    w: np.ndarray
    intercept: float
    coefficients: SplitCoefficients


@dataclass(frozen=True)
class LogisticFit:
    coefficients: SplitCoefficients
    intercept: float
    lam: float
    objective: float
    loglik: float
    iterations: int
    converged: bool
    trace: list = field(default_factory=list)
    K: int | None = None

    @property
    def coef(self):
        return self.coefficients.coef

    @property
    def monotone_magnitudes(self):
        return bool(np.all(np.diff(np.abs(self.coef)) <= 0))

    @property
    def blocks(self):
        if self.K is None:
            return [self.coefficients]
        K = self.K
        return [SplitCoefficients(self.coefficients.plus[s:s + K],
                                  self.coefficients.minus[s:s + K])
                for s in range(0, len(self.coefficients), K)]

    def predict_proba(self, X):
        eta = self.intercept + np.asarray(X, dtype=float) @ self.coef
        return 1.0 / (1.0 + np.exp(-eta))


def _check_binary(y):
    y = np.asarray(y, dtype=float).ravel()
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("logistic response must be coded 0/1")
    return y


def _coef_vector(coef):
    if isinstance(coef, SplitCoefficients):
        return coef.coef
    return np.asarray(coef, dtype=float).ravel()


def log_likelihood(X, y, intercept, coef) -> float:
    """sum_i y_i eta_i - log(1 + exp(eta_i)),  eta = b0 + X b."""
    y = _check_binary(y)
    eta = intercept + np.asarray(X, dtype=float) @ _coef_vector(coef)
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def log_likelihood_grad(X, y, intercept, coef):
    """Gradient of :func:`log_likelihood` as ``(d/db0, d/db)``."""
    X = np.asarray(X, dtype=float)
    y = _check_binary(y)
    eta = intercept + X @ _coef_vector(coef)
    resid = y - 1.0 / (1.0 + np.exp(-eta))
    return float(resid.sum()), X.T @ resid


def penalized_log_likelihood(X, y, intercept, coef: SplitCoefficients, lam):
    return log_likelihood(X, y, intercept, coef) - lam * coef.l1


def irls_state(X, y, intercept, coef: SplitCoefficients) -> IrlsState:
    eta = intercept + X @ coef.coef
    p = np.clip(1.0 / (1.0 + np.exp(-eta)), PROB_CLIP, 1.0 - PROB_CLIP)
    w = p * (1.0 - p)
    return IrlsState(eta + (y - p) / w, p, w, float(intercept), coef)


def _subproblem_value(Xc, z, w, b0, coef, lam):
    r = z - b0 - Xc @ coef.coef
    return 0.5 * float(np.sum(w * r * r)) + lam * coef.l1


def _solve_weighted(Xc, state: IrlsState, cfg: FitConfig, blocks, inner_tol,
                    max_inner):
    """Minimize the weighted subproblem from the state's parameters."""
    z, w = state.z, state.w
    sw = np.sqrt(w)
    lam = float(cfg.lam)
    plus = state.coefficients.plus.copy()
    minus = state.coefficients.minus.copy()
    b0 = state.intercept
    Xs = Xc * sw[:, None]
    grams = [Xs[:, s].T @ Xs[:, s] for s in blocks]
    Q = _subproblem_value(Xc, z, w, b0, SplitCoefficients(plus, minus), lam)
    for _ in range(max_inner):
        Q_start = Q
        beta = plus - minus
        b0 = float(np.sum(w * (z - Xc @ beta)) / np.sum(w))
        Q_new = _subproblem_value(Xc, z, w, b0, SplitCoefficients(plus, minus), lam)
        descent.check("irls-intercept", Q, Q_new)
        Q = Q_new
        for j, s in enumerate(blocks):
            beta = plus - minus
            r = z - b0 - Xc @ beta + Xc[:, s] @ beta[s]
            rs = sw * r
            warm = SplitCoefficients(plus[s], minus[s])
            new, _, _, _ = solve_gram(grams[j], Xs[:, s].T @ rs, rs @ rs, cfg,
                                      warm, kind="irls-prox-gradient")
            plus[s], minus[s] = new.plus, new.minus
            Q_new = _subproblem_value(Xc, z, w, b0,
                                      SplitCoefficients(plus, minus), lam)
            descent.check("irls-block", Q, Q_new)
            Q = Q_new
        if abs(Q_start - Q) <= inner_tol * max(abs(Q_start), 1e-300):
            break
    return b0, SplitCoefficients(plus, minus)


def fit_logistic_ordered(X, y, cfg: FitConfig, *, K=None, warm=None,
                         tol=1e-8, inner_tol=1e-8, max_outer=100,
                         max_inner=500) -> LogisticFit:
    """Maximize ``loglik(b+ - b-) - lam * sum(b+ + b-)`` under the order
    constraints.

    Parameters
    ----------
    X : array_like, shape (N, p)
        Predictors; centered internally, the returned intercept is on the
        original scale.
    y : array_like of 0/1
    cfg : FitConfig
        Penalty and settings of the inner ordered-lasso solves.
    K : int, optional
        Block width for lag-structured columns (blockwise inner solves).
    tol : float
        Outer stop on the relative change of the penalized log-likelihood.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = _check_binary(y)
    if X.shape[0] != y.size:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.size}")
    n, p = X.shape
    if K is None:
        blocks = [slice(0, p)]
    else:
        if K < 1 or p % K:
            raise ValueError(f"{p} columns is not a multiple of K={K}")
        blocks = [slice(s, s + K) for s in range(0, p, K)]
    xbar = X.mean(axis=0)
    Xc = X - xbar
    lam = float(cfg.lam)

    if warm is None:
        ybar = np.clip(y.mean(), PROB_CLIP, 1 - PROB_CLIP)
        b0 = float(np.log(ybar / (1 - ybar)))
        coef = SplitCoefficients.zeros(p)
    else:
        b0_raw, coef = warm
        b0 = float(b0_raw + xbar @ coef.coef)

    def F(b0_, coef_):
        return penalized_log_likelihood(Xc, y, b0_, coef_, lam)

    F_cur = F(b0, coef)
    trace = [F_cur]
    converged = False
    it = 0
    for it in range(1, max_outer + 1):
        state = irls_state(Xc, y, b0, coef)
        b0_new, coef_new = _solve_weighted(Xc, state, cfg, blocks, inner_tol,
                                           max_inner)
        # safeguard: damp the step until the penalized likelihood does not drop
        alpha = 1.0
        while True:
            cand_b0 = b0 + alpha * (b0_new - b0)
            cand = SplitCoefficients(coef.plus + alpha * (coef_new.plus - coef.plus),
                                     coef.minus + alpha * (coef_new.minus - coef.minus))
            F_new = F(cand_b0, cand)
            if F_new >= F_cur or alpha < 1e-10:
                break
            alpha *= 0.5
        if F_new < F_cur:
            # no ascent direction left at working precision
            converged = True
            break
        descent.check("irls-outer", F_cur, F_new, minimize=False)
        step = max(abs(cand_b0 - b0),
                   float(np.max(np.abs(cand.coef - coef.coef), initial=0.0)))
        small = abs(F_new - F_cur) <= tol * max(1.0, abs(F_cur))
        b0, coef, F_cur = cand_b0, cand, F_new
        trace.append(F_cur)
        if small and step <= 1e-6 * max(1.0, abs(b0)):
            converged = True
            break
    intercept = b0 - float(xbar @ coef.coef)
    return LogisticFit(coef, intercept, lam, F_cur,
                       log_likelihood(X, y, intercept, coef), it, converged,
                       trace, K)
