"""NumPy implementation of the constraint-update kernels.

Semantics are shared with the compiled backend, see ``maxlens.kernels``.

Both updates operate on stacked per-class parameter arrays:

    theta1 (C, d)     natural first parameter, Sigma^-1 m
    theta2 (C, d, d)  natural second parameter, Sigma^-1
    mean   (C, d)     dual mean m
    cov    (C, d, d)  dual covariance Sigma

``cls`` selects the classes covered by the constraint and ``weights`` holds
their row counts; a constraint's expectation is the weighted sum of
per-class contributions.
"""

from __future__ import annotations

import numpy as np

DENOM_EPS = 1e-12
# Variance floor below which a direction counts as collapsed for updates.
U_FLOOR = 1e-13

_OK = 0
_SATISFIED = 1
_STALLED = 2
_CLAMPED = 3


def linear_update(w, target, cls, weights, theta1, mean, cov):
    """Closed-form update satisfying one linear constraint exactly.

    lam = (target - vtilde) / sum_c n_c w' Sigma_c w, then theta1 += lam w
    and m += lam Sigma w per covered class. Covariances are untouched.
    Returns (lam, vtilde, status).
    """
    g = cov[cls] @ w  # (m, d)
    vtilde = float(weights @ (mean[cls] @ w))
    denom = float(weights @ (g @ w))
    if denom <= DENOM_EPS:
        return 0.0, vtilde, _STALLED
    lam = (target - vtilde) / denom
    theta1[cls] += lam * w
    mean[cls] += lam * g
    return lam, vtilde, _OK


def _phi_terms(lam, u, s, weights):
    den = 1.0 + lam * u
    return float(weights @ (u / den + s / (den * den)))


def quadratic_update(w, target, delta, cls, weights, theta1, theta2, mean, cov,
                     root_tol, lam_cap):
    """Rank-1 update satisfying one quadratic constraint.

    The post-update expectation as a function of the multiplier change lam is

        v(lam) = sum_c n_c [ u_c/(1+lam u_c) + (e_c-delta)^2/(1+lam u_c)^2 ],

    with u_c = w' Sigma_c w and e_c = m_c . w; v is strictly decreasing on
    the feasible interval (every 1 + lam u_c > 0), so the root of
    v(lam) = target is found by a safeguarded bisection/Newton scheme and
    clamped to the interval (or to +-lam_cap) when the root escapes it.

    Applies theta1 += lam delta w, theta2 += lam w w', the Sherman-Morrison
    covariance correction Sigma -= lam/(1+lam u) g g' with g = Sigma w, and
    m = Sigma theta1. Returns (lam, vtilde, status).
    """
    g = cov[cls] @ w  # (m, d)
    u = g @ w  # (m,)
    e = mean[cls] @ w  # (m,)
    s = (e - delta) ** 2

    vtilde = _phi_terms(0.0, u, s, weights)
    ftol = root_tol * max(1.0, abs(target))
    if abs(vtilde - target) <= ftol:
        return 0.0, vtilde, _SATISFIED

    u_max = float(u.max())
    if u_max <= U_FLOOR and vtilde > target:
        # No variance left to remove; the mean part is constant in lam.
        return 0.0, vtilde, _STALLED

    status = _OK
    if vtilde > target:
        lo, hi = 0.0, min(1.0, lam_cap)
        while _phi_terms(hi, u, s, weights) > target and hi < lam_cap:
            hi = min(hi * 8.0, lam_cap)
        if _phi_terms(hi, u, s, weights) > target:
            lam = lam_cap
            status = _CLAMPED
        else:
            lam = _bisect_root(lo, hi, target, u, s, weights, ftol)
    else:
        lam_lo = -1.0 / u_max
        lo = max(lam_lo + abs(lam_lo) * 1e-9, -lam_cap)
        hi = 0.0
        if _phi_terms(lo, u, s, weights) < target:
            lam = lo
            status = _CLAMPED
        else:
            lam = _bisect_root(lo, hi, target, u, s, weights, ftol)

    den = 1.0 + lam * u
    fac = lam / den
    cov[cls] -= fac[:, None, None] * (g[:, :, None] * g[:, None, :])
    theta2[cls] += lam * np.outer(w, w)
    theta1[cls] += (lam * delta) * w
    mean[cls] = np.einsum("cij,cj->ci", cov[cls], theta1[cls])
    return lam, vtilde, status


def _bisect_root(lo, hi, target, u, s, weights, ftol):
    """Root of v(lam) = target on [lo, hi] with v(lo) >= target >= v(hi).

    Plain bisection; v is monotone so the bracket never breaks.
    """
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f = _phi_terms(mid, u, s, weights) - target
        if abs(f) <= ftol:
            return mid
        if f > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(mid)):
            return 0.5 * (lo + hi)
    return 0.5 * (lo + hi)


def expectations(kinds, w, deltas, indptr, cls_idx, cls_w, mean, cov, out):
    """Current E[f_t] for every constraint, written into ``out``."""
    k = kinds.shape[0]
    for t in range(k):
        cls = cls_idx[indptr[t]:indptr[t + 1]]
        weights = cls_w[indptr[t]:indptr[t + 1]]
        if kinds[t]:
            g = cov[cls] @ w[t]
            u = g @ w[t]
            e = mean[cls] @ w[t]
            out[t] = float(weights @ (u + (e - deltas[t]) ** 2))
        else:
            out[t] = float(weights @ (mean[cls] @ w[t]))
    return out


def sweep(kinds, w, targets, deltas, indptr, cls_idx, cls_w,
          theta1, theta2, mean, cov, root_tol, lam_cap,
          cancel_flag, out_lam, out_vtilde, out_status):
    """One pass over all constraints in order.

    The cancel flag is checked between individual constraint updates; the
    return value is the number of updates that ran, so a cancelled sweep
    reports how far it got while leaving the parameters consistent.
    """
    k = kinds.shape[0]
    for t in range(k):
        if cancel_flag[0]:
            return t
        cls = cls_idx[indptr[t]:indptr[t + 1]]
        weights = cls_w[indptr[t]:indptr[t + 1]]
        if kinds[t]:
            lam, vtilde, status = quadratic_update(
                w[t], targets[t], deltas[t], cls, weights,
                theta1, theta2, mean, cov, root_tol, lam_cap,
            )
        else:
            lam, vtilde, status = linear_update(
                w[t], targets[t], cls, weights, theta1, mean, cov
            )
        out_lam[t] = lam
        out_vtilde[t] = vtilde
        out_status[t] = status
    return k
