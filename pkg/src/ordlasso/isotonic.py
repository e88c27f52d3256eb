"""Isotonic regression for the non-increasing order.

Exact fits use the Pool Adjacent Violators algorithm (linear time). The
nearly-isotonic relaxation replaces the hard order constraint with a penalty
``theta * sum (f_{i+1} - f_i)_+`` on up-jumps and is solved by the
group-merging path in ``theta``; ``theta = inf`` is exact PAVA.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ordlasso import _backend

# Relative tolerance for calling two neighbouring values equal when reading
# plateaus off sequences that did not come straight from PAVA.
PLATEAU_RTOL = 1e-8


@dataclass(frozen=True)
class WeightedSequence:
    """Values with positive observation weights (all ones by default)."""

    values: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if values.size == 0:
            raise ValueError("empty sequence")
        if not np.all(np.isfinite(values)):
            raise ValueError("sequence values must be finite")
        if self.weights is None:
            weights = np.ones_like(values)
        else:
            weights = np.asarray(self.weights, dtype=float).ravel()
            if weights.shape != values.shape:
                raise ValueError("weights must have the same length as values")
            if not np.all(weights > 0) or not np.all(np.isfinite(weights)):
                raise ValueError("weights must be positive and finite")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class IsotonicFit:
    """A fitted sequence and its plateaus as ``(start, end, value)``.

    ``end`` is exclusive, so ``fitted[start:end] == value``.
    """

    fitted: np.ndarray
    plateaus: list = field(default_factory=list)

    @property
    def n_plateaus(self):
        return len(self.plateaus)


@dataclass(frozen=True)
class NearIsoConfig:
    theta: float = math.inf

    def __post_init__(self):
        if not self.theta >= 0:  # also rejects NaN
            raise ValueError(f"theta must be non-negative, got {self.theta}")


def _as_sequence(seq, weights=None):
    if isinstance(seq, WeightedSequence):
        return seq
    return WeightedSequence(seq, weights)


def _plateaus_from_starts(fitted, starts):
    n = fitted.size
    bounds = list(starts) + [n]
    return [(int(bounds[k]), int(bounds[k + 1]), float(fitted[bounds[k]]))
            for k in range(len(starts))]


def plateaus(values, rtol=PLATEAU_RTOL):
    """Maximal runs of (approximately) equal consecutive values.

    Two neighbours belong to the same run when they differ by at most
    ``rtol * max(|a|, |b|)``; exactly equal values always do.
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        return []
    runs = []
    start = 0
    for i in range(1, values.size):
        a, b = values[i - 1], values[i]
        if abs(a - b) > rtol * max(abs(a), abs(b)):
            runs.append((start, i, float(values[start])))
            start = i
    runs.append((start, values.size, float(values[start])))
    return runs


def pava_nonincreasing(seq, weights=None) -> IsotonicFit:
    """Weighted least-squares fit under ``f_1 >= f_2 >= ... >= f_n``.

    Parameters
    ----------
    seq : WeightedSequence or array_like
        Values to fit. A bare array may be paired with ``weights``.
    weights : array_like, optional
        Positive weights; ignored when ``seq`` is already a WeightedSequence.

    Returns
    -------
    IsotonicFit
        Plateau values are weighted means of the inputs they cover and are
        strictly decreasing from one plateau to the next.
    """
    seq = _as_sequence(seq, weights)
    fitted, starts = _backend.kernels().pava_noninc(seq.values, seq.weights)
    return IsotonicFit(fitted, _plateaus_from_starts(fitted, starts))


def near_iso(seq, cfg=None, weights=None) -> IsotonicFit:
    """Nearly non-increasing fit.

    Minimizes ``0.5 * sum w_i (y_i - f_i)^2 + theta * sum (f_{i+1} - f_i)_+``.
    ``theta = 0`` returns the input and ``theta = inf`` is exact PAVA.
    """
    if cfg is None:
        cfg = NearIsoConfig()
    elif not isinstance(cfg, NearIsoConfig):
        cfg = NearIsoConfig(float(cfg))
    seq = _as_sequence(seq, weights)
    if math.isinf(cfg.theta):
        return pava_nonincreasing(seq)
    fitted = _backend.kernels().near_iso_noninc(seq.values, seq.weights,
                                               float(cfg.theta))
    return IsotonicFit(fitted, plateaus(fitted, rtol=0.0))


def near_iso_objective(values, fitted, theta, weights=None):
    """Penalized objective minimized by :func:`near_iso`."""
    values = np.asarray(values, dtype=float)
    fitted = np.asarray(fitted, dtype=float)
    w = np.ones_like(values) if weights is None else np.asarray(weights, float)
    loss = 0.5 * np.sum(w * (values - fitted) ** 2)
    ups = np.maximum(np.diff(fitted), 0.0).sum()
    if math.isinf(theta):
        return loss if ups == 0 else math.inf
    return loss + theta * ups
