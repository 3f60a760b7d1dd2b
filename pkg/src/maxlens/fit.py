"""Coordinate ascent over the constraint multipliers.

Constraints are swept in insertion order; each update satisfies its own
constraint exactly (the linear case in closed form, the quadratic case by a
monotone 1-D root find) and the next sweep repairs whatever it disturbed.
Convexity makes the round robin converge to the global optimum, except near
singular optima where variance collapses like 1/sweeps and a time budget is
the practical stopping rule.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .model import BackgroundModel, FitConfig

__all__ = [
    "CancelToken",
    "SweepRecord",
    "FitDiagnostics",
    "fit",
    "update_linear",
    "update_quadratic",
    "REFRESH_EVERY",
]

REFRESH_EVERY = 25


class CancelToken:
    """Cooperative cancellation readable from inside the sweep kernels.

    ``set()`` flips a byte the kernels check between individual constraint
    updates, so even a compiled sweep stops within one update.
    """

    __slots__ = ("flag", "_poll")

    def __init__(self):
        self.flag = np.zeros(1, dtype=np.uint8)
        self._poll = None  # optional per-sweep poll source wrapped by fit()

    def set(self) -> None:
        self.flag[0] = 1

    def is_set(self) -> bool:
        return bool(self.flag[0])


@dataclass(frozen=True)
class SweepRecord:
    sweep: int
    max_lambda_change: float
    max_residual: float
    elapsed_ms: float

    def line(self) -> str:
        return (
            f"sweep={self.sweep} max_dlambda={self.max_lambda_change:.6e} "
            f"max_residual={self.max_residual:.6e} elapsed_ms={self.elapsed_ms:.1f}"
        )


@dataclass
class FitDiagnostics:
    sweeps: int = 0
    converged_by: str | None = None
    stalled: set[int] = field(default_factory=set)
    clamped: set[int] = field(default_factory=set)
    records: list[SweepRecord] = field(default_factory=list)
    residuals: np.ndarray | None = None
    wall_time: float = 0.0

    def log_lines(self) -> list[str]:
        return [r.line() for r in self.records]


def _apply(model: BackgroundModel, t: int, root_tol: float, diag: FitDiagnostics | None):
    """Apply one constraint update through the active kernel backend."""
    p = model._prepared[t]
    if p.is_quad:
        lam, vtilde, status = kernels.quadratic_update(
            p.w, p.target, p.delta, p.cls, p.weights,
            model.theta1, model.theta2, model.mean, model.cov,
            root_tol, kernels.LAMBDA_CAP,
        )
    else:
        lam, vtilde, status = kernels.linear_update(
            p.w, p.target, p.cls, p.weights, model.theta1, model.mean, model.cov
        )
    if diag is not None:
        if status == kernels.STATUS_STALLED:
            diag.stalled.add(t)
        elif status == kernels.STATUS_CLAMPED:
            diag.clamped.add(t)
    return lam, vtilde, status


def update_linear(model: BackgroundModel, t: int) -> float:
    """Apply the closed-form update for linear constraint t; returns the multiplier change."""
    lam, _, _ = _apply(model, t, 1e-10, model.diagnostics)
    return lam


def update_quadratic(model: BackgroundModel, t: int, root_tolerance: float = 1e-10) -> float:
    """Apply the rank-1 update for quadratic constraint t; returns the multiplier change."""
    lam, _, _ = _apply(model, t, root_tolerance, model.diagnostics)
    return lam


def _normalize_cancel(cancel) -> CancelToken:
    """Accept a CancelToken, threading.Event, callable or None."""
    if cancel is None or isinstance(cancel, CancelToken):
        return cancel or CancelToken()
    token = CancelToken()
    if isinstance(cancel, threading.Event):
        poll = cancel.is_set
    else:
        poll = cancel
    token._poll = poll  # type: ignore[attr-defined]  # checked once per sweep
    return token


def fit(
    model: BackgroundModel,
    config: FitConfig | None = None,
    progress=None,
    cancel=None,
) -> BackgroundModel:
    """Run the sweep loop until a stopping rule fires.

    ``progress`` is called with a SweepRecord after every sweep. ``cancel``
    may be a CancelToken (checked between individual constraint updates,
    even inside the compiled sweep), a threading.Event or a nullary callable
    (both polled once per sweep); a cancelled fit ends with consistent
    parameters and status "cutoff".

    A convergence criterion only declares success if every constraint's
    residual sits inside its moment tolerance, so a converged status is never
    a silently partial state.
    """
    config = config or FitConfig()
    token = _normalize_cancel(cancel)
    poll = token._poll
    diag = FitDiagnostics()
    model.diagnostics = diag
    k = len(model.constraints)
    start = time.perf_counter()
    if k == 0:
        model.fit_status = "converged"
        diag.converged_by = "no constraints"
        diag.residuals = np.zeros(0)
        return model

    model.fit_status = "in_progress"
    packed = model._packed
    quad = packed.kinds.astype(bool)
    row_counts = np.array([p.row_count for p in model._prepared], dtype=float)[quad]
    moment_scale = config.moment_tolerance * max(model.data_scale, 1e-12)
    prev_mean = model.mean.copy()
    prev_sval: np.ndarray | None = None
    out_lam = np.zeros(k)
    out_vtilde = np.zeros(k)
    out_status = np.zeros(k, dtype=np.int32)
    status = None
    sweep = 0

    while True:
        sweep += 1
        if poll is not None and poll():
            token.set()
        n_done = kernels.sweep(
            packed.kinds, packed.w, packed.targets, packed.deltas,
            packed.indptr, packed.cls_idx, packed.cls_w,
            model.theta1, model.theta2, model.mean, model.cov,
            config.root_tolerance, kernels.LAMBDA_CAP, token.flag,
            out_lam, out_vtilde, out_status,
        )
        done = slice(0, n_done)
        if np.any(out_status[done] == kernels.STATUS_STALLED):
            diag.stalled.update(np.flatnonzero(out_status[done] == kernels.STATUS_STALLED).tolist())
        if np.any(out_status[done] == kernels.STATUS_CLAMPED):
            diag.clamped.update(np.flatnonzero(out_status[done] == kernels.STATUS_CLAMPED).tolist())
        max_dlam = float(np.max(np.abs(out_lam[done]))) if n_done else 0.0
        max_resid = (
            float(np.max(np.abs(packed.targets[done] - out_vtilde[done]))) if n_done else 0.0
        )

        elapsed = time.perf_counter() - start
        record = SweepRecord(sweep, max_dlam, max_resid, elapsed * 1e3)
        diag.records.append(record)
        if progress is not None:
            progress(record)

        if n_done < k or token.is_set():
            status = "cutoff"
            diag.converged_by = "cancelled"
            break

        # sqrt of the per-row quadratic expectations, the "std units" the
        # moment criterion watches alongside the class means
        dmean = float(np.max(np.abs(model.mean - prev_mean)))
        if row_counts.size:
            sval = np.sqrt(np.maximum(out_vtilde[quad], 0.0) / row_counts)
            dsval = np.inf if prev_sval is None else float(np.max(np.abs(sval - prev_sval)))
        else:
            sval = None
            dsval = 0.0
        lambda_quiet = max_dlam <= config.lambda_tolerance
        moment_quiet = dmean <= moment_scale and dsval <= moment_scale
        if lambda_quiet or moment_quiet:
            if np.all(model.residuals() <= model.residual_tolerances(config.moment_tolerance)):
                status = "converged"
                diag.converged_by = "lambda" if lambda_quiet else "moments"
                break
        prev_mean[...] = model.mean
        prev_sval = sval

        if config.time_budget is not None and elapsed >= config.time_budget:
            status = "cutoff"
            diag.converged_by = "time budget"
            break
        if config.max_sweeps is not None and sweep >= config.max_sweeps:
            status = "cutoff"
            diag.converged_by = "sweep budget"
            break
        if sweep % REFRESH_EVERY == 0:
            model.refresh_duals()

    model.refresh_duals()
    diag.sweeps = sweep
    diag.residuals = model.residuals()
    diag.wall_time = time.perf_counter() - start
    model.fit_status = status
    return model
