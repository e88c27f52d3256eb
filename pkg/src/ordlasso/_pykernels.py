"""Pure-Python reference kernels.

Same signatures and semantics as the compiled ``_ckernels`` extension; used
when the extension is unavailable, and as the cross-check in the test suite.
"""

import math

import numpy as np

# Relative slack allowed on an accepted step before it counts as an ascent.
DESCENT_SLACK = 1e-10

_MAX_BACKTRACKS = 80


def pava_noninc(y, w):
    """Weighted non-increasing isotonic regression.

    Returns ``(fitted, starts)`` where ``starts`` holds the first index of
    every plateau. Plateau values are strictly decreasing.
    """
    n = len(y)
    means = [0.0] * n
    wts = [0.0] * n
    starts = [0] * n
    m = 0
    for i in range(n):
        means[m] = float(y[i])
        wts[m] = float(w[i])
        starts[m] = i
        m += 1
        while m > 1 and means[m - 2] <= means[m - 1]:
            wl, wr = wts[m - 2], wts[m - 1]
            if means[m - 2] != means[m - 1]:
                means[m - 2] += (means[m - 1] - means[m - 2]) * (wr / (wl + wr))
            wts[m - 2] = wl + wr
            m -= 1
    fitted = np.empty(n)
    for b in range(m):
        end = starts[b + 1] if b + 1 < m else n
        fitted[starts[b]:end] = means[b]
    return fitted, np.asarray(starts[:m], dtype=np.intp)


def near_iso_noninc(y, w, theta):
    """Nearly non-increasing fit by the group-merging path in the penalty.

    Minimizes ``0.5 * sum w_i (y_i - f_i)^2 + theta * sum (f_{i+1} - f_i)_+``.
    The path starts from ``f = y`` at zero penalty; fitted groups move
    linearly and only ever fuse, so the solution at ``theta`` is reached
    after at most ``n - 1`` merge events.
    """
    n = len(y)
    if math.isinf(theta):
        return pava_noninc(y, w)[0]
    # group arrays: start index, total weight, current value
    gs, gw, gv = [], [], []
    for i in range(n):
        yi, wi = float(y[i]), float(w[i])
        if gs and gv[-1] == yi:
            gw[-1] += wi
        else:
            gs.append(i)
            gw.append(wi)
            gv.append(yi)
    lam = 0.0
    while True:
        g = len(gv)
        slope = [0.0] * g
        for k in range(g):
            s = 0.0
            if k > 0 and gv[k - 1] < gv[k]:
                s -= 1.0
            if k + 1 < g and gv[k + 1] > gv[k]:
                s += 1.0
            slope[k] = s / gw[k]
        hit = math.inf
        for k in range(g - 1):
            rel = slope[k + 1] - slope[k]
            if rel != 0.0:
                dt = (gv[k] - gv[k + 1]) / rel
                if 0.0 < dt < hit:
                    hit = dt
        if lam + hit >= theta:
            step = theta - lam
            for k in range(g):
                gv[k] += slope[k] * step
            break
        lam += hit
        old = gv[:]
        for k in range(g):
            gv[k] += slope[k] * hit
        # fuse every pair whose collision time matches the event
        ns, nw, nv = [gs[0]], [gw[0]], [gv[0]]
        for k in range(1, g):
            rel = slope[k] - slope[k - 1]
            fuse = False
            if rel != 0.0:
                dt = (old[k - 1] - old[k]) / rel
                fuse = dt > 0.0 and dt <= hit * (1.0 + 1e-12) + 1e-300
            if fuse or nv[-1] == gv[k]:
                wl, wr = nw[-1], gw[k]
                nv[-1] = nv[-1] + (gv[k] - nv[-1]) * (wr / (wl + wr))
                nw[-1] = wl + wr
            else:
                ns.append(gs[k])
                nw.append(gw[k])
                nv.append(gv[k])
        gs, gw, gv = ns, nw, nv
    fitted = np.empty(n)
    for k in range(len(gs)):
        end = gs[k + 1] if k + 1 < len(gs) else n
        fitted[gs[k]:end] = gv[k]
    return fitted


def prox(point, lam, w, theta, monotone):
    """Proximal map of ``lam * sum(u) + indicator(u_1 >= ... >= u_n >= 0)``.

    The quadratic term is ``0.5 * sum w_i (u_i - point_i)^2``. With
    ``monotone=False`` the order constraint is dropped (plain nonnegative
    soft threshold), which is the lasso baseline.
    """
    shifted = np.asarray(point, dtype=float) - lam / np.asarray(w, dtype=float)
    if not monotone:
        return np.maximum(shifted, 0.0)
    if math.isinf(theta):
        fitted = pava_noninc(shifted, w)[0]
    else:
        fitted = near_iso_noninc(shifted, w, theta)
    fitted[fitted <= 0.0] = 0.0
    return fitted


def _quad(G, c, yy, b):
    return 0.5 * yy - c @ b + 0.5 * (b @ (G @ b))


def solve_block(G, c, yy, lam, bp, bm, max_iter, tol, step0, shrink, theta,
                monotone):
    """Alternating proximal-gradient descent on the split coefficients.

    The smooth part is given in Gram form, ``0.5*yy - c'b + 0.5*b'Gb`` with
    ``b = bp - bm``. Each outer iteration takes one backtracked step on
    ``bp`` then one on ``bm``; step sizes are tracked per half and only
    shrink. Returns ``(bp, bm, objective, iterations, converged, n_checks,
    n_violations, worst_violation)``.
    """
    G = np.asarray(G, dtype=float)
    c = np.asarray(c, dtype=float)
    bp = np.array(bp, dtype=float)
    bm = np.array(bm, dtype=float)
    ones = np.ones(len(c))
    steps = [float(step0), float(step0)]
    b = bp - bm
    f = _quad(G, c, yy, b)
    F = f + lam * (bp.sum() + bm.sum())
    n_checks = n_viol = 0
    worst = 0.0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        F_start = F
        for half in (0, 1):
            cur = bp if half == 0 else bm
            other = bm if half == 0 else bp
            grad = G @ b - c
            if half == 1:
                grad = -grad
            t = steps[half]
            accepted = False
            for _ in range(_MAX_BACKTRACKS):
                u = prox(cur - t * grad, t * lam, ones, theta, monotone)
                d = u - cur
                b_new = u - other if half == 0 else other - u
                f_new = _quad(G, c, yy, b_new)
                if f_new <= f + grad @ d + (d @ d) / (2.0 * t) + 1e-14 * abs(f):
                    accepted = True
                    break
                t *= shrink
            steps[half] = t
            if not accepted:
                continue
            F_new = f_new + lam * (u.sum() + other.sum())
            n_checks += 1
            excess = F_new - F
            if excess > DESCENT_SLACK * max(1.0, abs(F)):
                n_viol += 1
                worst = max(worst, excess)
            if half == 0:
                bp = u
            else:
                bm = u
            b, f, F = b_new, f_new, F_new
        if abs(F_start - F) <= tol * abs(F_start):
            converged = True
            break
    return bp, bm, F, it, converged, n_checks, n_viol, worst
