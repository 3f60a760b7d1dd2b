# cython: language_level=3
"""Compiled twins of the update kernels in ``reference.py``.

Same contract, same status codes; the point is removing per-class and
per-constraint Python overhead from the coordinate-ascent inner loop. The
``sweep`` entry point runs a whole pass over the constraint set in C,
checking the shared cancel flag between individual updates.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

DENOM_EPS = 1e-12
U_FLOOR = 1e-13

cdef double _DENOM_EPS = 1e-12
cdef double _U_FLOOR = 1e-13

cdef int _OK = 0
cdef int _SATISFIED = 1
cdef int _STALLED = 2
cdef int _CLAMPED = 3


cdef struct UpdateResult:
    double lam
    double vtilde
    int status


cdef UpdateResult _linear_c(const double[::1] w, double target,
                            const cnp.int64_t[::1] cls, const double[::1] weights,
                            double[:, ::1] theta1, double[:, ::1] mean,
                            double[:, :, ::1] cov,
                            double[:, ::1] g) noexcept:
    cdef Py_ssize_t m = cls.shape[0]
    cdef Py_ssize_t d = w.shape[0]
    cdef Py_ssize_t a, i, j
    cdef cnp.int64_t c
    cdef double acc, dot
    cdef UpdateResult res
    res.vtilde = 0.0
    cdef double denom = 0.0

    for a in range(m):
        c = cls[a]
        dot = 0.0
        for i in range(d):
            acc = 0.0
            for j in range(d):
                acc += cov[c, i, j] * w[j]
            g[a, i] = acc
            dot += acc * w[i]
        denom += weights[a] * dot
        acc = 0.0
        for i in range(d):
            acc += mean[c, i] * w[i]
        res.vtilde += weights[a] * acc

    if denom <= _DENOM_EPS:
        res.lam = 0.0
        res.status = _STALLED
        return res
    res.lam = (target - res.vtilde) / denom
    for a in range(m):
        c = cls[a]
        for i in range(d):
            theta1[c, i] += res.lam * w[i]
            mean[c, i] += res.lam * g[a, i]
    res.status = _OK
    return res


cdef double _phi(double lam, const double[::1] u, const double[::1] s,
                 const double[::1] weights, Py_ssize_t m) noexcept:
    cdef Py_ssize_t a
    cdef double den, total = 0.0
    for a in range(m):
        den = 1.0 + lam * u[a]
        total += weights[a] * (u[a] / den + s[a] / (den * den))
    return total


cdef double _bisect_root(double lo, double hi, double target,
                         const double[::1] u, const double[::1] s,
                         const double[::1] weights,
                         Py_ssize_t m, double ftol) noexcept:
    cdef Py_ssize_t it
    cdef double mid, f, span
    for it in range(200):
        mid = 0.5 * (lo + hi)
        f = _phi(mid, u, s, weights, m) - target
        if fabs(f) <= ftol:
            return mid
        if f > 0.0:
            lo = mid
        else:
            hi = mid
        span = 1.0 if fabs(mid) < 1.0 else fabs(mid)
        if hi - lo <= 1e-15 * span:
            return 0.5 * (lo + hi)
    return 0.5 * (lo + hi)


cdef UpdateResult _quadratic_c(const double[::1] w, double target, double delta,
                               const cnp.int64_t[::1] cls, const double[::1] weights,
                               double[:, ::1] theta1, double[:, :, ::1] theta2,
                               double[:, ::1] mean, double[:, :, ::1] cov,
                               double root_tol, double lam_cap,
                               double[:, ::1] g, double[::1] u, double[::1] s) noexcept:
    cdef Py_ssize_t m = cls.shape[0]
    cdef Py_ssize_t d = w.shape[0]
    cdef Py_ssize_t a, i, j
    cdef cnp.int64_t c
    cdef double acc, dot, u_max, lo, hi, lam_lo, den, fac, ld, lam
    cdef UpdateResult res

    u_max = 0.0
    for a in range(m):
        c = cls[a]
        dot = 0.0
        for i in range(d):
            acc = 0.0
            for j in range(d):
                acc += cov[c, i, j] * w[j]
            g[a, i] = acc
            dot += acc * w[i]
        u[a] = dot
        if dot > u_max:
            u_max = dot
        acc = 0.0
        for i in range(d):
            acc += mean[c, i] * w[i]
        s[a] = (acc - delta) * (acc - delta)

    res.vtilde = _phi(0.0, u, s, weights, m)
    cdef double ftol = root_tol * (1.0 if fabs(target) < 1.0 else fabs(target))
    if fabs(res.vtilde - target) <= ftol:
        res.lam = 0.0
        res.status = _SATISFIED
        return res
    if u_max <= _U_FLOOR and res.vtilde > target:
        res.lam = 0.0
        res.status = _STALLED
        return res

    res.status = _OK
    if res.vtilde > target:
        lo = 0.0
        hi = 1.0 if lam_cap > 1.0 else lam_cap
        while _phi(hi, u, s, weights, m) > target and hi < lam_cap:
            hi = hi * 8.0
            if hi > lam_cap:
                hi = lam_cap
        if _phi(hi, u, s, weights, m) > target:
            lam = lam_cap
            res.status = _CLAMPED
        else:
            lam = _bisect_root(lo, hi, target, u, s, weights, m, ftol)
    else:
        lam_lo = -1.0 / u_max
        lo = lam_lo + fabs(lam_lo) * 1e-9
        if lo < -lam_cap:
            lo = -lam_cap
        hi = 0.0
        if _phi(lo, u, s, weights, m) < target:
            lam = lo
            res.status = _CLAMPED
        else:
            lam = _bisect_root(lo, hi, target, u, s, weights, m, ftol)

    ld = lam * delta
    for a in range(m):
        c = cls[a]
        den = 1.0 + lam * u[a]
        fac = lam / den
        for i in range(d):
            for j in range(d):
                cov[c, i, j] -= fac * g[a, i] * g[a, j]
                theta2[c, i, j] += lam * w[i] * w[j]
            theta1[c, i] += ld * w[i]
        for i in range(d):
            acc = 0.0
            for j in range(d):
                acc += cov[c, i, j] * theta1[c, j]
            mean[c, i] = acc
    res.lam = lam
    return res


def linear_update(const double[::1] w, double target,
                  const cnp.int64_t[::1] cls, const double[::1] weights,
                  double[:, ::1] theta1, double[:, ::1] mean,
                  double[:, :, ::1] cov):
    g = np.empty((cls.shape[0], w.shape[0]), dtype=np.float64)
    cdef UpdateResult res = _linear_c(w, target, cls, weights, theta1, mean, cov, g)
    return res.lam, res.vtilde, res.status


def quadratic_update(const double[::1] w, double target, double delta,
                     const cnp.int64_t[::1] cls, const double[::1] weights,
                     double[:, ::1] theta1, double[:, :, ::1] theta2,
                     double[:, ::1] mean, double[:, :, ::1] cov,
                     double root_tol, double lam_cap):
    cdef Py_ssize_t m = cls.shape[0]
    g = np.empty((m, w.shape[0]), dtype=np.float64)
    u = np.empty(m, dtype=np.float64)
    s = np.empty(m, dtype=np.float64)
    cdef UpdateResult res = _quadratic_c(
        w, target, delta, cls, weights, theta1, theta2, mean, cov,
        root_tol, lam_cap, g, u, s,
    )
    return res.lam, res.vtilde, res.status


def expectations(const cnp.uint8_t[::1] kinds, const double[:, ::1] w,
                 const double[::1] deltas,
                 const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] cls_idx,
                 const double[::1] cls_w,
                 double[:, ::1] mean, double[:, :, ::1] cov,
                 double[::1] out):
    """Current E[f_t] for every constraint, written into ``out``."""
    cdef Py_ssize_t k = kinds.shape[0]
    cdef Py_ssize_t d = w.shape[1]
    cdef Py_ssize_t t, a, i, j
    cdef cnp.int64_t c
    cdef double total, acc, dot, e
    for t in range(k):
        total = 0.0
        for a in range(indptr[t], indptr[t + 1]):
            c = cls_idx[a]
            if kinds[t]:
                dot = 0.0
                e = 0.0
                for i in range(d):
                    acc = 0.0
                    for j in range(d):
                        acc += cov[c, i, j] * w[t, j]
                    dot += acc * w[t, i]
                    e += mean[c, i] * w[t, i]
                e -= deltas[t]
                total += cls_w[a] * (dot + e * e)
            else:
                acc = 0.0
                for i in range(d):
                    acc += mean[c, i] * w[t, i]
                total += cls_w[a] * acc
        out[t] = total
    return np.asarray(out)


def sweep(const cnp.uint8_t[::1] kinds, const double[:, ::1] w,
          const double[::1] targets, const double[::1] deltas,
          const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] cls_idx,
          const double[::1] cls_w,
          double[:, ::1] theta1, double[:, :, ::1] theta2,
          double[:, ::1] mean, double[:, :, ::1] cov,
          double root_tol, double lam_cap,
          const cnp.uint8_t[::1] cancel_flag,
          double[::1] out_lam, double[::1] out_vtilde,
          cnp.int32_t[::1] out_status):
    """One pass over all constraints; returns how many updates ran."""
    cdef Py_ssize_t k = kinds.shape[0]
    cdef Py_ssize_t d = w.shape[1]
    cdef Py_ssize_t t, m_max, m, lo_i
    cdef UpdateResult res

    m_max = 0
    for t in range(k):
        m = indptr[t + 1] - indptr[t]
        if m > m_max:
            m_max = m
    g_buf = np.empty((m_max, d), dtype=np.float64)
    u_buf = np.empty(m_max, dtype=np.float64)
    s_buf = np.empty(m_max, dtype=np.float64)
    cdef double[:, ::1] g = g_buf
    cdef double[::1] u = u_buf
    cdef double[::1] s = s_buf

    for t in range(k):
        if cancel_flag[0]:
            return t
        lo_i = indptr[t]
        m = indptr[t + 1] - lo_i
        if kinds[t]:
            res = _quadratic_c(
                w[t], targets[t], deltas[t],
                cls_idx[lo_i:lo_i + m], cls_w[lo_i:lo_i + m],
                theta1, theta2, mean, cov, root_tol, lam_cap,
                g[:m], u[:m], s[:m],
            )
        else:
            res = _linear_c(
                w[t], targets[t],
                cls_idx[lo_i:lo_i + m], cls_w[lo_i:lo_i + m],
                theta1, mean, cov, g[:m],
            )
        out_lam[t] = res.lam
        out_vtilde[t] = res.vtilde
        out_status[t] = res.status
    return k
