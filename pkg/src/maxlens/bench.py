"""Headless reproduction of the convergence and runtime experiments,
plus a benchmark pitting the compiled kernels against the NumPy fallback.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .constraints import expand_composite
from .data import DataMatrix, standardize
from .fastica import fastica
from .fit import REFRESH_EVERY, FitDiagnostics, fit
from .model import FitConfig, init_model
from .partition import build_partition
from .synth import gen_adversarial3, gen_clustered
from .whitening import whiten

__all__ = ["run_convergence", "run_runtime", "RuntimeRow", "kernel_bench"]


class _SweepRunner:
    """Drives raw sweeps over a model through the active kernel backend."""

    def __init__(self, model):
        self.model = model
        k = len(model.constraints)
        self._flag = np.zeros(1, dtype=np.uint8)
        self._lam = np.zeros(k)
        self._vtilde = np.zeros(k)
        self._status = np.zeros(k, dtype=np.int32)

    def run_sweep(self, root_tol: float = 1e-10):
        packed = self.model._packed
        kernels.sweep(
            packed.kinds, packed.w, packed.targets, packed.deltas,
            packed.indptr, packed.cls_idx, packed.cls_w,
            self.model.theta1, self.model.theta2, self.model.mean, self.model.cov,
            root_tol, kernels.LAMBDA_CAP, self._flag,
            self._lam, self._vtilde, self._status,
        )


def run_convergence(case: str, sweeps: int, return_state: bool = False):
    """Trace of the first row's variance entry (0,0) over fixed sweeps.

    Stopping rules are out of the picture here: the loop runs exactly
    ``sweeps`` sweeps over the chosen adversarial constraint set. Index 0 of
    the trace is the initial unit variance, index s the value after sweep s.
    Under set A the entry drops to 0.25 in the first sweep and stays there;
    under set B it decays like 1/sweeps toward the singular optimum.

    With ``return_state`` the fitted model comes back alongside the trace.
    """
    if case not in ("A", "B"):
        raise ValueError(f"case must be 'A' or 'B', got {case!r}")
    data, cons_a, cons_b = gen_adversarial3()
    constraints = cons_a if case == "A" else cons_b
    partition = build_partition(data.n, constraints)
    model = init_model(partition, constraints, data.d, data_scale=float(data.values.std()))
    model.diagnostics = FitDiagnostics()
    cls0 = int(partition.class_of_row[0])
    trace = np.empty(sweeps + 1)
    trace[0] = model.cov[cls0, 0, 0]
    runner = _SweepRunner(model)
    for s in range(1, sweeps + 1):
        runner.run_sweep()
        if s % REFRESH_EVERY == 0:
            model.refresh_duals()
        trace[s] = model.cov[cls0, 0, 0]
    if return_state:
        return trace, model
    return trace


@dataclass(frozen=True)
class RuntimeRow:
    n: int
    d: int
    k: int
    init_s: float
    optim_s: float
    ica_s: float
    sweeps: int
    fit_status: str


def _benchmark_constraints(data: DataMatrix, k: int):
    """Column constraints plus one cluster constraint per labeled cluster."""
    composites = [expand_composite(data, "margin")]
    if k > 1:
        for j in range(k):
            rows = data.label_rows(f"c{j}")
            composites.append(expand_composite(data, "cluster", rows=rows))
    prims = []
    for comp in composites:
        prims.extend(comp.expansion)
    return prims


def run_runtime(
    ns,
    ds,
    ks,
    repeats: int = 10,
    seed: int = 0,
    config: FitConfig | None = None,
) -> list[RuntimeRow]:
    """Median wall times of model setup, optimization and ICA per (n, d, k).

    The optimizer runs with default stopping tolerances and no time cutoff,
    so the optim column reflects work to convergence. Setup (data generation,
    constraint evaluation, partition build) is timed separately: it scales
    with n while the optimizer touches row classes only.
    """
    if config is None:
        config = FitConfig(time_budget=None)
    rows = []
    for n in ns:
        for d in ds:
            for k in ks:
                t_init, t_optim, t_ica, sweeps, statuses = [], [], [], [], []
                for r in range(repeats):
                    data = standardize(gen_clustered(n, d, k, seed=seed + 7919 * r))
                    t0 = time.perf_counter()
                    prims = _benchmark_constraints(data, k)
                    partition = build_partition(data.n, prims)
                    model = init_model(partition, prims, data.d)
                    t1 = time.perf_counter()
                    fit(model, config)
                    t2 = time.perf_counter()
                    white = whiten(data, model)
                    fastica(white.values, n_components=min(d, 20), seed=seed)
                    t3 = time.perf_counter()
                    t_init.append(t1 - t0)
                    t_optim.append(t2 - t1)
                    t_ica.append(t3 - t2)
                    sweeps.append(model.diagnostics.sweeps)
                    statuses.append(model.fit_status)
                rows.append(
                    RuntimeRow(
                        n=n,
                        d=d,
                        k=k,
                        init_s=float(np.median(t_init)),
                        optim_s=float(np.median(t_optim)),
                        ica_s=float(np.median(t_ica)),
                        sweeps=int(np.median(sweeps)),
                        fit_status=max(statuses, key=statuses.count),
                    )
                )
    return rows


def kernel_bench(d: int = 32, k: int = 4, n: int = 2048, sweeps: int = 20, seed: int = 0):
    """Time identical sweep workloads on every available kernel backend.

    Returns {backend: seconds}. The workload is the runtime-experiment
    constraint set (margin + k clusters) swept a fixed number of times.
    """
    data = standardize(gen_clustered(n, d, k, seed=seed))
    prims = _benchmark_constraints(data, k)
    partition = build_partition(data.n, prims)
    results: dict[str, float] = {}
    previous = kernels.BACKEND
    try:
        for name in sorted(kernels.available_backends()):
            kernels.select(name)
            model = init_model(partition, prims, data.d)
            model.diagnostics = FitDiagnostics()
            runner = _SweepRunner(model)
            t0 = time.perf_counter()
            for _ in range(sweeps):
                runner.run_sweep()
            results[name] = time.perf_counter() - t0
    finally:
        kernels.select(previous)
    return results
