"""Time-lagged regression with one ordered block of lags per predictor.

Static prediction takes a design already laid out block by block (predictor
``j`` occupies ``K`` contiguous columns, lag 1 first). Rolling prediction
builds that layout from a multivariate series. Both are solved by blockwise
coordinate descent: each block is refit with the single-block ordered lasso
against the partial residual of all other blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ordlasso import descent
from ordlasso.solver import (Dataset, FitConfig, SplitCoefficients, center,
                             solve_gram)


@dataclass(frozen=True)
class LagSpec:
    """``p`` predictors, ``K`` lags each.

    ``first_lag`` is the lag of the first column of every block: 1 for the
    usual "previous K time points", 0 to include the same time point.
    """

    p: int
    K: int
    first_lag: int = 1

    def __post_init__(self):
        if self.p < 1 or self.K < 1:
            raise ValueError(f"need p >= 1 and K >= 1, got p={self.p}, K={self.K}")
        if self.first_lag < 0:
            raise ValueError("first_lag must be non-negative")

    @property
    def max_lag(self):
        return self.first_lag + self.K - 1

    def lags(self):
        return np.arange(self.first_lag, self.first_lag + self.K)


@dataclass(frozen=True)
class LagDesign:
    Z: np.ndarray
    spec: LagSpec
    origin: str = "static"
    dropped_rows: int = 0
    rows: np.ndarray | None = None

    @property
    def K(self):
        return self.spec.K

    @property
    def p(self):
        return self.spec.p

    @property
    def blocks(self):
        K = self.spec.K
        return [slice(j * K, (j + 1) * K) for j in range(self.spec.p)]

    def block(self, j):
        return self.Z[:, self.blocks[j]]


@dataclass(frozen=True)
class BlockFit:
    """Per-predictor split coefficients from a blockwise fit."""

    blocks: list
    intercept: float
    lam: float
    objective: float
    cycles: int
    converged: bool
    K: int
    first_lag: int = 1

    @property
    def p(self):
        return len(self.blocks)

    @property
    def coef(self):
        """``p x K`` array of effective coefficients."""
        return np.vstack([b.coef for b in self.blocks])

    @property
    def split(self):
        """All blocks concatenated as one SplitCoefficients."""
        return SplitCoefficients(np.concatenate([b.plus for b in self.blocks]),
                                 np.concatenate([b.minus for b in self.blocks]))

    def is_feasible(self):
        return all(b.is_feasible() for b in self.blocks)

    @property
    def monotone_magnitudes(self):
        return [bool(np.all(np.diff(np.abs(b.coef)) <= 0)) for b in self.blocks]

    def predict(self, Z):
        return self.intercept + np.asarray(Z, dtype=float) @ self.split.coef


def _as_2d(series):
    x = np.asarray(series, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError("series must be a vector or an N x p matrix")
    return x


def build_rolling_design(series, spec: LagSpec | int, response=None):
    """Lagged design for rolling prediction.

    Row for time ``t`` is ``x[t-l, j]`` for ``l = first_lag .. max_lag`` within
    block ``j``. The first ``max_lag`` time points lack a full history and are
    dropped.

    Parameters
    ----------
    series : array_like, shape (N,) or (N, p)
    spec : LagSpec or int
        An int is taken as ``K`` with ``p`` read from the series.
    response : array_like, optional
        Outcome series of length N. Defaults to the series itself when it is
        univariate (autoregression); otherwise no response is aligned.

    Returns
    -------
    (LagDesign, ndarray or None)
    """
    x = _as_2d(series)
    N, p = x.shape
    if not isinstance(spec, LagSpec):
        spec = LagSpec(p, int(spec))
    if spec.p != p:
        raise ValueError(f"spec expects {spec.p} predictors, series has {p}")
    L = spec.max_lag
    if N <= L:
        raise ValueError("series shorter than maximum lag")
    rows = np.arange(L, N)
    Z = np.empty((rows.size, p * spec.K))
    for j in range(p):
        for k, lag in enumerate(spec.lags()):
            Z[:, j * spec.K + k] = x[rows - lag, j]
    design = LagDesign(Z, spec, "rolling", L, rows)
    if response is None:
        y = x[rows, 0].copy() if p == 1 else None
    else:
        resp = np.asarray(response, dtype=float).ravel()
        if resp.size != N:
            raise ValueError(f"response has length {resp.size}, series has {N}")
        y = resp[rows]
    return design, y


def block_objective(Z, y, blocks, lam):
    """0.5 * ||y - sum_j Z_j b_j||^2 + lam * sum_j l1(b_j)."""
    split = SplitCoefficients(np.concatenate([b.plus for b in blocks]),
                              np.concatenate([b.minus for b in blocks]))
    r = y - Z @ split.coef
    return float(0.5 * (r @ r) + lam * split.l1)


def fit_static(data: Dataset, K: int, cfg: FitConfig, warm=None, *,
               tol=1e-7, max_cycles=200, first_lag=1) -> BlockFit:
    """Blockwise coordinate descent for a design in lag layout.

    Parameters
    ----------
    data : Dataset
        Centered; ``data.X`` has ``K * p`` columns, block ``j`` being columns
        ``j*K .. (j+1)*K - 1``.
    K : int
        Lags per block.
    cfg : FitConfig
        Settings for every single-block solve.
    warm : sequence of SplitCoefficients, optional
    tol : float
        Relative change of the full objective between cycles that ends the
        descent.
    max_cycles : int
    """
    if not data.centered or not data.is_centered():
        raise ValueError("data must be centered; call center() first")
    Z, y = data.X, data.y
    if K < 1 or Z.shape[1] % K:
        raise ValueError(f"{Z.shape[1]} columns is not a multiple of K={K}")
    p = Z.shape[1] // K
    cols = [slice(j * K, (j + 1) * K) for j in range(p)]
    grams = [Z[:, s].T @ Z[:, s] for s in cols]
    if warm is None:
        coefs = [SplitCoefficients.zeros(K) for _ in range(p)]
    else:
        coefs = list(warm)
        if len(coefs) != p or any(len(b) != K for b in coefs):
            raise ValueError("warm start does not match the block layout")
    lam = float(cfg.lam)
    F = block_objective(Z, y, coefs, lam)
    converged = False
    cycle = 0
    for cycle in range(1, max_cycles + 1):
        F_start = F
        for j in range(p):
            r = y.copy()
            for l in range(p):
                if l != j:
                    r -= Z[:, cols[l]] @ coefs[l].coef
            Zj = Z[:, cols[j]]
            coefs[j], Fj, _, _ = solve_gram(grams[j], Zj.T @ r, r @ r, cfg,
                                            coefs[j], kind="block-prox-gradient")
            F_new = Fj + lam * sum(coefs[l].l1 for l in range(p) if l != j)
            descent.check("block-coordinate", F, F_new)
            F = F_new
        if p == 1 or abs(F_start - F) <= tol * abs(F_start):
            converged = True
            break
    beta = np.concatenate([b.coef for b in coefs])
    intercept = data.y_mean - float(data.column_means @ beta)
    return BlockFit(coefs, intercept, lam, block_objective(Z, y, coefs, lam),
                    cycle, converged, K, first_lag)


def rolling_dataset(series, spec, response=None):
    """Center the rolling design over its usable rows."""
    design, y = build_rolling_design(series, spec, response)
    if y is None:
        raise ValueError("a response series is required for multivariate input")
    return design, center(Dataset(design.Z, y))


def fit_rolling(series, spec, cfg: FitConfig, response=None, warm=None,
                **kwargs) -> BlockFit:
    """Rolling prediction: :func:`fit_static` on the rolling lag design."""
    design, data = rolling_dataset(series, spec, response)
    return fit_static(data, design.K, cfg, warm, first_lag=design.spec.first_lag,
                      **kwargs)


def effective_lags(fit, tol=1e-8):
    """Per block, the 1-based position of the last coefficient above ``tol``.

    With the default ``first_lag = 1`` this is the lag itself; 0 marks an
    all-zero block.
    """
    if isinstance(fit, BlockFit):
        rows = [b.coef for b in fit.blocks]
    else:
        rows = [np.asarray(r, dtype=float) for r in np.atleast_2d(fit)]
    out = []
    for row in rows:
        nz = np.flatnonzero(np.abs(row) > tol)
        out.append(int(nz[-1]) + 1 if nz.size else 0)
    return out
