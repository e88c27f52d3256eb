# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: PAVA, near-isotonic path, the monotone prox and the
alternating proximal-gradient block solver.

Mirrors ``_pykernels`` exactly; see that module for the reference semantics.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY, isinf
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef int MAX_BACKTRACKS = 80
DESCENT_SLACK = 1e-10
cdef double _SLACK = 1e-10


cdef Py_ssize_t _pava(const double* y, const double* w, Py_ssize_t n,
                      double* means, double* wts, Py_ssize_t* starts,
                      double* out) noexcept nogil:
    cdef Py_ssize_t i, b, j, end, m = 0
    cdef double wl, wr
    for i in range(n):
        means[m] = y[i]
        wts[m] = w[i]
        starts[m] = i
        m += 1
        while m > 1 and means[m - 2] <= means[m - 1]:
            wl = wts[m - 2]
            wr = wts[m - 1]
            if means[m - 2] != means[m - 1]:
                means[m - 2] += (means[m - 1] - means[m - 2]) * (wr / (wl + wr))
            wts[m - 2] = wl + wr
            m -= 1
    for b in range(m):
        end = starts[b + 1] if b + 1 < m else n
        for j in range(starts[b], end):
            out[j] = means[b]
    return m


cdef int _near_iso(const double* y, const double* w, Py_ssize_t n,
                   double theta, double* out) noexcept nogil:
    cdef Py_ssize_t i, k, g, ng, end
    cdef double lam = 0.0, hit, rel, dt, s, step, wl, wr
    cdef bint fuse
    cdef Py_ssize_t* gs = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    cdef double* gw = <double*> malloc(n * sizeof(double))
    cdef double* gv = <double*> malloc(n * sizeof(double))
    cdef double* old = <double*> malloc(n * sizeof(double))
    cdef double* slope = <double*> malloc(n * sizeof(double))
    if gs == NULL or gw == NULL or gv == NULL or old == NULL or slope == NULL:
        free(gs); free(gw); free(gv); free(old); free(slope)
        return -1
    g = 0
    for i in range(n):
        if g > 0 and gv[g - 1] == y[i]:
            gw[g - 1] += w[i]
        else:
            gs[g] = i
            gw[g] = w[i]
            gv[g] = y[i]
            g += 1
    while True:
        for k in range(g):
            s = 0.0
            if k > 0 and gv[k - 1] < gv[k]:
                s -= 1.0
            if k + 1 < g and gv[k + 1] > gv[k]:
                s += 1.0
            slope[k] = s / gw[k]
        hit = INFINITY
        for k in range(g - 1):
            rel = slope[k + 1] - slope[k]
            if rel != 0.0:
                dt = (gv[k] - gv[k + 1]) / rel
                if dt > 0.0 and dt < hit:
                    hit = dt
        if lam + hit >= theta:
            step = theta - lam
            for k in range(g):
                gv[k] += slope[k] * step
            break
        lam += hit
        for k in range(g):
            old[k] = gv[k]
            gv[k] += slope[k] * hit
        ng = 1
        for k in range(1, g):
            rel = slope[k] - slope[k - 1]
            fuse = False
            if rel != 0.0:
                dt = (old[k - 1] - old[k]) / rel
                fuse = dt > 0.0 and dt <= hit * (1.0 + 1e-12) + 1e-300
            if fuse or gv[ng - 1] == gv[k]:
                wl = gw[ng - 1]
                wr = gw[k]
                gv[ng - 1] = gv[ng - 1] + (gv[k] - gv[ng - 1]) * (wr / (wl + wr))
                gw[ng - 1] = wl + wr
            else:
                gs[ng] = gs[k]
                gw[ng] = gw[k]
                gv[ng] = gv[k]
                ng += 1
        g = ng
    for k in range(g):
        end = gs[k + 1] if k + 1 < g else n
        for i in range(gs[k], end):
            out[i] = gv[k]
    free(gs); free(gw); free(gv); free(old); free(slope)
    return 0


cdef int _prox(const double* point, double lam, const double* w, Py_ssize_t n,
               double theta, bint monotone, double* shifted, double* means,
               double* wts, Py_ssize_t* starts, double* out) noexcept nogil:
    cdef Py_ssize_t i
    cdef int rc = 0
    for i in range(n):
        shifted[i] = point[i] - lam / w[i]
    if not monotone:
        for i in range(n):
            out[i] = shifted[i] if shifted[i] > 0.0 else 0.0
        return 0
    if isinf(theta):
        _pava(shifted, w, n, means, wts, starts, out)
    else:
        rc = _near_iso(shifted, w, n, theta, out)
    for i in range(n):
        if out[i] <= 0.0:
            out[i] = 0.0
    return rc


def pava_noninc(y, w):
    cdef cnp.ndarray[double, ndim=1, mode="c"] yy = np.ascontiguousarray(y, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] ww = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t n = yy.shape[0]
    cdef cnp.ndarray[double, ndim=1, mode="c"] out = np.empty(n)
    cdef cnp.ndarray[double, ndim=1, mode="c"] means = np.empty(max(n, 1))
    cdef cnp.ndarray[double, ndim=1, mode="c"] wts = np.empty(max(n, 1))
    cdef cnp.ndarray[Py_ssize_t, ndim=1, mode="c"] starts = np.empty(max(n, 1), dtype=np.intp)
    cdef Py_ssize_t m
    with nogil:
        m = _pava(&yy[0], &ww[0], n, &means[0], &wts[0], &starts[0], &out[0])
    return out, starts[:m].copy()


def near_iso_noninc(y, w, double theta):
    if isinf(theta):
        return pava_noninc(y, w)[0]
    cdef cnp.ndarray[double, ndim=1, mode="c"] yy = np.ascontiguousarray(y, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] ww = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t n = yy.shape[0]
    cdef cnp.ndarray[double, ndim=1, mode="c"] out = np.empty(n)
    cdef int rc
    with nogil:
        rc = _near_iso(&yy[0], &ww[0], n, theta, &out[0])
    if rc != 0:
        raise MemoryError()
    return out


def prox(point, double lam, w, double theta, bint monotone):
    cdef cnp.ndarray[double, ndim=1, mode="c"] pt = np.ascontiguousarray(point, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] ww = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t n = pt.shape[0]
    cdef cnp.ndarray[double, ndim=1, mode="c"] out = np.empty(n)
    cdef cnp.ndarray[double, ndim=1, mode="c"] shifted = np.empty(n)
    cdef cnp.ndarray[double, ndim=1, mode="c"] means = np.empty(n)
    cdef cnp.ndarray[double, ndim=1, mode="c"] wts = np.empty(n)
    cdef cnp.ndarray[Py_ssize_t, ndim=1, mode="c"] starts = np.empty(n, dtype=np.intp)
    cdef int rc
    with nogil:
        rc = _prox(&pt[0], lam, &ww[0], n, theta, monotone, &shifted[0],
                   &means[0], &wts[0], &starts[0], &out[0])
    if rc != 0:
        raise MemoryError()
    return out


cdef inline double _quad(const double* G, const double* c, double yy,
                         const double* b, Py_ssize_t p) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double lin = 0.0, quad = 0.0, row
    for i in range(p):
        lin += c[i] * b[i]
        row = 0.0
        for j in range(p):
            row += G[i * p + j] * b[j]
        quad += b[i] * row
    return 0.5 * yy - lin + 0.5 * quad


def solve_block(G, c, double yy, double lam, bp, bm, int max_iter, double tol,
                double step0, double shrink, double theta, bint monotone):
    cdef cnp.ndarray[double, ndim=2, mode="c"] Ga = np.ascontiguousarray(G, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] ca = np.ascontiguousarray(c, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] xp = np.array(bp, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] xm = np.array(bm, dtype=np.float64)
    cdef Py_ssize_t p = ca.shape[0]
    cdef cnp.ndarray[double, ndim=2, mode="c"] work = np.empty((9, p))
    cdef cnp.ndarray[Py_ssize_t, ndim=1, mode="c"] starts = np.empty(p, dtype=np.intp)
    cdef double* Gp = &Ga[0, 0]
    cdef double* cp = &ca[0]
    cdef double* cur
    cdef double* other
    cdef double* b = &work[0, 0]
    cdef double* grad = &work[1, 0]
    cdef double* trial = &work[2, 0]
    cdef double* u = &work[3, 0]
    cdef double* bnew = &work[4, 0]
    cdef double* ones = &work[5, 0]
    cdef double* shifted = &work[6, 0]
    cdef double* means = &work[7, 0]
    cdef double* wts = &work[8, 0]
    cdef double steps[2]
    cdef double f, F, F_start, F_new, f_new, t, gd, dd, d, excess, sum_u, sum_o
    cdef Py_ssize_t i, j, k
    cdef int it = 0, half, n_checks = 0, n_viol = 0, rc = 0
    cdef double worst = 0.0
    cdef bint accepted, converged = False
    steps[0] = step0
    steps[1] = step0
    with nogil:
        for i in range(p):
            ones[i] = 1.0
            b[i] = xp[i] - xm[i]
        f = _quad(Gp, cp, yy, b, p)
        sum_u = 0.0
        for i in range(p):
            sum_u += xp[i] + xm[i]
        F = f + lam * sum_u
        it = 0
        while it < max_iter:
            it += 1
            F_start = F
            for half in range(2):
                if half == 0:
                    cur = &xp[0]
                    other = &xm[0]
                else:
                    cur = &xm[0]
                    other = &xp[0]
                for i in range(p):
                    gd = -cp[i]
                    for j in range(p):
                        gd += Gp[i * p + j] * b[j]
                    grad[i] = gd if half == 0 else -gd
                t = steps[half]
                accepted = False
                for k in range(MAX_BACKTRACKS):
                    for i in range(p):
                        trial[i] = cur[i] - t * grad[i]
                    rc = _prox(trial, t * lam, ones, p, theta, monotone,
                               shifted, means, wts, &starts[0], u)
                    if rc != 0:
                        break
                    gd = 0.0
                    dd = 0.0
                    for i in range(p):
                        d = u[i] - cur[i]
                        gd += grad[i] * d
                        dd += d * d
                        bnew[i] = u[i] - other[i] if half == 0 else other[i] - u[i]
                    f_new = _quad(Gp, cp, yy, bnew, p)
                    if f_new <= f + gd + dd / (2.0 * t) + 1e-14 * fabs(f):
                        accepted = True
                        break
                    t *= shrink
                if rc != 0:
                    break
                steps[half] = t
                if not accepted:
                    continue
                sum_u = 0.0
                sum_o = 0.0
                for i in range(p):
                    sum_u += u[i]
                    sum_o += other[i]
                F_new = f_new + lam * (sum_u + sum_o)
                n_checks += 1
                excess = F_new - F
                if excess > _SLACK * (fabs(F) if fabs(F) > 1.0 else 1.0):
                    n_viol += 1
                    if excess > worst:
                        worst = excess
                for i in range(p):
                    cur[i] = u[i]
                    b[i] = bnew[i]
                f = f_new
                F = F_new
            if rc != 0:
                break
            if fabs(F_start - F) <= tol * fabs(F_start):
                converged = True
                break
    if rc != 0:
        raise MemoryError()
    return xp, xm, F, it, bool(converged), n_checks, n_viol, worst
