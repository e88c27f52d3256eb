"""Proximal operator of the monotone non-negative l1 penalty."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ordlasso import _backend


@dataclass(frozen=True)
class ProxRequest:
    """Arguments of one prox evaluation.

    ``lam`` is the effective penalty (penalty times step size). ``weights``
    scale the quadratic term per coordinate; ``theta`` switches the exact
    order constraint to the nearly-isotonic penalty.
    """

    point: np.ndarray
    lam: float
    weights: np.ndarray | None = None
    theta: float | None = None

    def __post_init__(self):
        point = np.asarray(self.point, dtype=float).ravel()
        if point.size == 0:
            raise ValueError("empty sequence")
        if not self.lam >= 0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float).ravel()
            if w.shape != point.shape or not np.all(w > 0):
                raise ValueError("weights must be positive and match point")
            object.__setattr__(self, "weights", w)
        if self.theta is not None and not self.theta >= 0:
            raise ValueError(f"theta must be non-negative, got {self.theta}")
        object.__setattr__(self, "point", point)


def prox_monotone_nonneg(req, lam=None, weights=None, theta=None):
    """argmin_u  lam*sum(u) + 0.5*sum w_i (u_i - point_i)^2  over u_1>=...>=u_n>=0.

    Computed by a non-increasing isotonic fit of ``point - lam/w`` followed by
    clipping at zero. A finite ``theta`` swaps the isotonic fit for the
    nearly-isotonic one (the order then becomes a penalty, non-negativity
    stays hard).

    Accepts either a :class:`ProxRequest` or ``(point, lam, weights, theta)``.
    """
    if not isinstance(req, ProxRequest):
        req = ProxRequest(req, 0.0 if lam is None else lam, weights, theta)
    w = req.weights if req.weights is not None else np.ones_like(req.point)
    th = math.inf if req.theta is None else float(req.theta)
    return _backend.kernels().prox(req.point, float(req.lam), w, th, True)


def soft_threshold_nonneg(point, lam):
    """The order-free counterpart used by the lasso baseline."""
    if lam < 0:
        raise ValueError(f"lam must be non-negative, got {lam}")
    return np.maximum(np.asarray(point, dtype=float) - lam, 0.0)
