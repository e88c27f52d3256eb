"""Independent reference solutions used by the tests.

Nothing here calls into ordlasso's kernels: isotonic and prox problems are
solved by enumerating every partition into contiguous blocks (the solution
is piecewise constant on some such partition), and the regression problems
are handed to a generic convex solver.
"""

import itertools

import numpy as np


def _partitions(n):
    """All ways to cut range(n) into contiguous blocks, as lists of slices."""
    for cuts in itertools.product((False, True), repeat=n - 1):
        edges = [0] + [i + 1 for i, c in enumerate(cuts) if c] + [n]
        yield [slice(a, b) for a, b in zip(edges[:-1], edges[1:])]


def isotonic_enum(y, w=None):
    """argmin 0.5 * sum w (y - t)^2 over t_1 >= ... >= t_n, by enumeration."""
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if w is None else np.asarray(w, dtype=float)
    best, best_val = None, np.inf
    for parts in _partitions(y.size):
        t = np.empty_like(y)
        for s in parts:
            t[s] = np.sum(w[s] * y[s]) / np.sum(w[s])
        if np.all(np.diff(t) <= 1e-12):
            val = 0.5 * np.sum(w * (y - t) ** 2)
            if val < best_val:
                best, best_val = t, val
    return best


def prox_enum(point, lam, w=None):
    """argmin lam*sum(u) + 0.5*sum w (u - point)^2 over u_1>=...>=u_n>=0.

    Candidates are block means of ``point - lam/w`` with the last block
    optionally pinned at zero.
    """
    b = np.asarray(point, dtype=float)
    w = np.ones_like(b) if w is None else np.asarray(w, dtype=float)
    z = b - lam / w
    best, best_val = None, np.inf
    for parts in _partitions(b.size):
        for pin_last in (False, True):
            u = np.empty_like(b)
            for s in parts:
                u[s] = np.sum(w[s] * z[s]) / np.sum(w[s])
            if pin_last:
                u[parts[-1]] = 0.0
            if np.all(np.diff(u) <= 1e-12) and np.all(u >= -1e-12):
                val = lam * u.sum() + 0.5 * np.sum(w * (u - b) ** 2)
                if val < best_val:
                    best, best_val = u, val
    return best


def _solve(problem):
    import cvxpy as cp

    try:
        problem.solve(solver=cp.CLARABEL, tol_gap_abs=1e-11, tol_gap_rel=1e-11,
                      tol_feas=1e-11)
    except (cp.SolverError, TypeError):
        problem.solve(solver=cp.CLARABEL)
    return problem


def ordered_lasso_qp(X, y, lam, K=None):
    """Optimal value and effective coefficients of the split-cone problem.

    With ``K`` the columns form blocks of width K, each constrained
    separately. Data are used as given (center beforehand).
    """
    import cvxpy as cp

    X = np.asarray(X, dtype=float)
    p = X.shape[1]
    K = p if K is None else K
    bp = cp.Variable(p, nonneg=True)
    bm = cp.Variable(p, nonneg=True)
    cons = []
    for s in range(0, p, K):
        for v in (bp, bm):
            if K > 1:
                cons.append(v[s:s + K - 1] >= v[s + 1:s + K])
    obj = 0.5 * cp.sum_squares(y - X @ (bp - bm)) + lam * cp.sum(bp + bm)
    prob = _solve(cp.Problem(cp.Minimize(obj), cons))
    return float(prob.value), bp.value - bm.value


def near_iso_qp(y, theta, w=None):
    """argmin 0.5*sum w (y - f)^2 + theta * sum (f_{i+1} - f_i)_+."""
    import cvxpy as cp

    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if w is None else np.asarray(w, dtype=float)
    f = cp.Variable(y.size)
    obj = 0.5 * cp.sum(cp.multiply(w, cp.square(y - f)))
    if y.size > 1:
        obj = obj + theta * cp.sum(cp.pos(f[1:] - f[:-1]))
    _solve(cp.Problem(cp.Minimize(obj)))
    return f.value


def logistic_qp(X, y, lam):
    """Maximize the penalized log-likelihood with an unpenalized intercept.

    Returns ``(value, intercept, coef)``.
    """
    import cvxpy as cp

    p = X.shape[1]
    b0 = cp.Variable()
    bp = cp.Variable(p, nonneg=True)
    bm = cp.Variable(p, nonneg=True)
    eta = b0 + X @ (bp - bm)
    ll = cp.sum(cp.multiply(y, eta) - cp.logistic(eta))
    cons = [bp[:-1] >= bp[1:], bm[:-1] >= bm[1:]] if p > 1 else []
    prob = _solve(cp.Problem(cp.Maximize(ll - lam * cp.sum(bp + bm)), cons))
    return float(prob.value), float(b0.value), bp.value - bm.value
