"""Background model state: one Gaussian parameter block per row class.

The model over datasets factorizes per row; rows in the same equivalence
class share natural parameters (Sigma^-1 m, Sigma^-1) and dual parameters
(m, Sigma). Both forms are kept so constraint updates stay rank-1 cheap,
at the cost of periodic refreshes to cancel floating-point drift.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np

from .constraints import PrimitiveConstraint
from .partition import RowPartition

__all__ = [
    "ClassParams",
    "FitConfig",
    "BackgroundModel",
    "init_model",
    "expected_value",
    "refresh_duals",
    "SIGMA_EIG_FLOOR",
]

# Eigenvalue floor for dual covariances; the matching cap keeps the natural
# parameters finite when a direction has collapsed.
SIGMA_EIG_FLOOR = 1e-12
SIGMA_EIG_CAP = 1e12
SCALE_FLOOR = 1e-9


@dataclass(frozen=True)
class ClassParams:
    """Read-only snapshot of one class's parameter block."""

    natural_first: np.ndarray  # Sigma^-1 m
    natural_second: np.ndarray  # Sigma^-1
    dual_mean: np.ndarray  # m
    dual_cov: np.ndarray  # Sigma


@dataclass(frozen=True)
class FitConfig:
    """Stopping rules for the coordinate ascent.

    The fit stops when the largest multiplier change in a sweep falls under
    ``lambda_tolerance``, or when class means and the square roots of the
    quadratic constraint expectations stop moving by more than
    ``moment_tolerance`` times the full-data standard deviation, or when the
    time budget runs out. ``time_budget=None`` and ``max_sweeps=None``
    disable those limits.
    """

    lambda_tolerance: float = 1e-2
    moment_tolerance: float = 1e-2
    time_budget: float | None = 10.0
    max_sweeps: int | None = None
    root_tolerance: float = 1e-10

    def __post_init__(self):
        for name in ("lambda_tolerance", "moment_tolerance", "root_tolerance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time_budget must be > 0 or None")
        if self.max_sweeps is not None and self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1 or None")


@dataclass(frozen=True)
class _Prepared:
    """Per-constraint arrays in the layout the update kernels expect."""

    is_quad: bool
    w: np.ndarray  # (d,) contiguous
    target: float
    delta: float  # anchor . w, only used by quadratic updates
    cls: np.ndarray  # (m,) int64 class indices covered by the constraint
    weights: np.ndarray  # (m,) float64 class sizes
    row_count: int
    scale: float  # directional std of the full data


@dataclass(frozen=True)
class _Packed:
    """All constraints flattened for the sweep kernels.

    Covered classes are stored CSR style: constraint t owns
    ``cls_idx[indptr[t]:indptr[t+1]]`` with matching ``cls_w`` weights.
    """

    kinds: np.ndarray  # (k,) uint8, 0 linear / 1 quadratic
    w: np.ndarray  # (k, d) float64
    targets: np.ndarray  # (k,)
    deltas: np.ndarray  # (k,)
    indptr: np.ndarray  # (k+1,) int64
    cls_idx: np.ndarray  # (nnz,) int64
    cls_w: np.ndarray  # (nnz,) float64


class BackgroundModel:
    """Mutable fit state over a fixed partition and constraint list."""

    def __init__(self, partition: RowPartition, constraints, d: int, data_scale: float = 1.0):
        self.partition = partition
        self.constraints: tuple[PrimitiveConstraint, ...] = tuple(constraints)
        self.d = int(d)
        self.data_scale = float(data_scale)
        c = partition.n_classes
        self.theta1 = np.zeros((c, self.d))
        self.theta2 = np.tile(np.eye(self.d), (c, 1, 1))
        self.mean = np.zeros((c, self.d))
        self.cov = np.tile(np.eye(self.d), (c, 1, 1))
        self.fit_status = "unfitted"
        self.version = 0
        self.diagnostics = None
        self._prepared = self._prepare()
        self._packed = self._pack()

    def _prepare(self) -> list[_Prepared]:
        sizes = self.partition.class_sizes.astype(np.float64)
        prepared = []
        for t, con in enumerate(self.constraints):
            cls = self.partition.classes_for_constraint(t)
            prepared.append(
                _Prepared(
                    is_quad=con.kind == "quadratic",
                    w=np.array(con.direction, dtype=np.float64),  # writable copy for the kernels
                    target=float(con.target),
                    delta=float(con.anchor @ con.direction),
                    cls=np.ascontiguousarray(cls, dtype=np.int64),
                    weights=np.ascontiguousarray(sizes[cls]),
                    row_count=con.row_count(),
                    scale=float(con.scale),
                )
            )
        return prepared

    def _pack(self) -> _Packed:
        k = len(self._prepared)
        kinds = np.array([1 if p.is_quad else 0 for p in self._prepared], dtype=np.uint8)
        w = np.zeros((k, self.d))
        targets = np.zeros(k)
        deltas = np.zeros(k)
        indptr = np.zeros(k + 1, dtype=np.int64)
        idx_parts, w_parts = [], []
        for t, p in enumerate(self._prepared):
            w[t] = p.w
            targets[t] = p.target
            deltas[t] = p.delta
            indptr[t + 1] = indptr[t] + p.cls.size
            idx_parts.append(p.cls)
            w_parts.append(p.weights)
        cls_idx = np.concatenate(idx_parts) if idx_parts else np.zeros(0, dtype=np.int64)
        cls_w = np.concatenate(w_parts) if w_parts else np.zeros(0)
        return _Packed(kinds, w, targets, deltas, indptr,
                       np.ascontiguousarray(cls_idx, dtype=np.int64),
                       np.ascontiguousarray(cls_w))

    @property
    def n_classes(self) -> int:
        return self.partition.n_classes

    def class_params(self, c: int) -> ClassParams:
        return ClassParams(
            natural_first=self.theta1[c].copy(),
            natural_second=self.theta2[c].copy(),
            dual_mean=self.mean[c].copy(),
            dual_cov=self.cov[c].copy(),
        )

    def row_params(self, i: int) -> ClassParams:
        return self.class_params(int(self.partition.class_of_row[i]))

    def snapshot(self) -> "BackgroundModel":
        """Deep copy safe to hand to another thread."""
        return copy.deepcopy(self)

    def expected_value(self, t: int) -> float:
        """E[f_t] under the current parameters, summed over covered classes."""
        p = self._prepared[t]
        if not p.is_quad:
            return float(p.weights @ (self.mean[p.cls] @ p.w))
        g = self.cov[p.cls] @ p.w
        u = g @ p.w
        e = self.mean[p.cls] @ p.w
        return float(p.weights @ (u + (e - p.delta) ** 2))

    def expected_values(self) -> np.ndarray:
        """E[f_t] for all constraints in one kernel pass."""
        from . import kernels

        p = self._packed
        out = np.zeros(len(self.constraints))
        if out.size:
            kernels.expectations(
                p.kinds, p.w, p.deltas, p.indptr, p.cls_idx, p.cls_w,
                self.mean, self.cov, out,
            )
        return out

    def residuals(self) -> np.ndarray:
        """Absolute gap |E[f_t] - target_t| per constraint."""
        return np.abs(self.expected_values() - self._packed.targets)

    def residual_tolerances(self, moment_tolerance: float) -> np.ndarray:
        scales = np.array([max(p.scale, SCALE_FLOOR) for p in self._prepared])
        return moment_tolerance * scales

    def refresh_duals(self) -> int:
        """Recompute (Sigma, m) from the natural parameters per class.

        Cancels drift accumulated by incremental rank-1 updates. Eigenvalues
        of Sigma are clamped to [floor, cap]; returns how many classes needed
        clamping (singular or collapsed parameter blocks).
        """
        evals, evecs = np.linalg.eigh(self.theta2)  # batched over classes
        clipped = np.clip(evals, 1.0 / SIGMA_EIG_CAP, 1.0 / SIGMA_EIG_FLOOR)
        bad = np.any(clipped != evals, axis=1)
        if np.any(bad):
            self.theta2[bad] = np.einsum(
                "cij,cj,ckj->cik", evecs[bad], clipped[bad], evecs[bad]
            )
        sig = np.einsum("cij,cj,ckj->cik", evecs, 1.0 / clipped, evecs)
        self.cov[...] = 0.5 * (sig + sig.transpose(0, 2, 1))
        self.mean[...] = np.einsum("cij,cj->ci", self.cov, self.theta1)
        return int(np.count_nonzero(bad))

    def entropy(self) -> float:
        """Relative entropy against the unit-Gaussian prior (diagnostic only)."""
        total = 0.0
        for c in range(self.n_classes):
            evals = np.clip(np.linalg.eigvalsh(self.cov[c]), SIGMA_EIG_FLOOR, None)
            kl = 0.5 * (
                float(evals.sum())
                + float(self.mean[c] @ self.mean[c])
                - self.d
                - float(np.log(evals).sum())
            )
            total -= self.partition.class_sizes[c] * kl
        return total


def init_model(partition: RowPartition, constraints, d: int, data_scale: float = 1.0) -> BackgroundModel:
    """Fresh model with every class at the unit-Gaussian starting point."""
    return BackgroundModel(partition, constraints, d, data_scale)


def expected_value(model: BackgroundModel, t: int) -> float:
    return model.expected_value(t)


def refresh_duals(model: BackgroundModel) -> int:
    return model.refresh_duals()
