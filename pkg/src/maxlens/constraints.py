"""Constraint functions and the user-level constraint types built from them.

A primitive constraint fixes the expectation of one statistic of the data:
either a linear sum of projections over a row subset,

    f_lin(X, I, w) = sum_{i in I} w . x_i,

or a quadratic sum of squared deviations around a fixed anchor,

    f_quad(X, I, w) = sum_{i in I} (w . (x_i - m_I))^2,
    m_I = mean of the observed rows in I.

The anchor m_I is a constant captured from the observed data when the
constraint is created; treating it as a random quantity would couple rows
together and break the per-row factorization of the background model.

User-level knowledge (margins, clusters, the current 2-D view) expands into
lists of primitives, each carrying the value of its statistic on the
observed data as the target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DataMatrix
from .errors import InvalidConstraintError

__all__ = [
    "PrimitiveConstraint",
    "CompositeConstraint",
    "eval_linear",
    "eval_quadratic",
    "anchor_mean",
    "cluster_directions",
    "make_primitive",
    "expand_composite",
    "dedupe_primitives",
    "DIRECTION_DEDUP_TOL",
    "ORTHOGONALITY_TOL",
]

DIRECTION_DEDUP_TOL = 1e-10
ORTHOGONALITY_TOL = 1e-8


def _check_rows(n: int, rows) -> np.ndarray:
    rows = np.unique(np.asarray(rows, dtype=np.intp))
    if rows.size == 0:
        raise InvalidConstraintError("constraint row set is empty")
    if rows[0] < 0 or rows[-1] >= n:
        raise InvalidConstraintError(f"row index out of range for n={n}")
    return rows


def _check_direction(d: int, w) -> np.ndarray:
    w = np.ascontiguousarray(np.asarray(w, dtype=np.float64))
    if w.shape != (d,):
        raise InvalidConstraintError(f"direction has shape {w.shape}, expected ({d},)")
    if not np.all(np.isfinite(w)):
        raise InvalidConstraintError("direction has non-finite entries")
    if np.linalg.norm(w) == 0.0:
        raise InvalidConstraintError("direction has zero norm")
    return w


def anchor_mean(data: DataMatrix, rows) -> np.ndarray:
    """Mean of the observed rows in I, the fixed anchor of quadratic constraints."""
    rows = _check_rows(data.n, rows)
    return data.values[rows].mean(axis=0)


def eval_linear(data: DataMatrix, rows, w) -> float:
    """Evaluate sum_{i in I} w . x_i on the observed data."""
    rows = _check_rows(data.n, rows)
    w = _check_direction(data.d, w)
    return float(np.sum(data.values[rows] @ w))


def eval_quadratic(data: DataMatrix, rows, w) -> float:
    """Evaluate sum_{i in I} (w . (x_i - m_I))^2 on the observed data."""
    rows = _check_rows(data.n, rows)
    w = _check_direction(data.d, w)
    centered = data.values[rows] - data.values[rows].mean(axis=0)
    return float(np.sum((centered @ w) ** 2))


@dataclass(frozen=True)
class PrimitiveConstraint:
    """One expectation equation E[f(X, I, w)] = target.

    ``anchor`` is the observed row mean of I, fixed at creation.  ``scale``
    is the standard deviation of the full observed data projected on the
    direction; residuals are judged against it.
    """

    kind: str  # "linear" | "quadratic"
    rows: np.ndarray
    direction: np.ndarray
    target: float
    anchor: np.ndarray
    scale: float

    def __post_init__(self):
        if self.kind not in ("linear", "quadratic"):
            raise InvalidConstraintError(f"unknown constraint kind {self.kind!r}")
        for name in ("rows", "direction", "anchor"):
            arr = getattr(self, name)
            arr.flags.writeable = False

    def row_count(self) -> int:
        return int(self.rows.size)

    def matches(self, other: "PrimitiveConstraint", tol: float = DIRECTION_DEDUP_TOL) -> bool:
        """True when kind, rows and direction coincide (direction within tol)."""
        return (
            self.kind == other.kind
            and self.rows.size == other.rows.size
            and bool(np.all(self.rows == other.rows))
            and bool(np.max(np.abs(self.direction - other.direction)) <= tol)
        )


def make_primitive(data: DataMatrix, kind: str, rows, w) -> PrimitiveConstraint:
    """Build a primitive constraint with its target evaluated on the data."""
    rows = _check_rows(data.n, rows)
    w = _check_direction(data.d, w)
    if kind == "linear":
        target = eval_linear(data, rows, w)
    elif kind == "quadratic":
        target = eval_quadratic(data, rows, w)
    else:
        raise InvalidConstraintError(f"unknown constraint kind {kind!r}")
    return PrimitiveConstraint(
        kind=kind,
        rows=rows,
        direction=w,
        target=target,
        anchor=anchor_mean(data, rows),
        scale=float((data.values @ w).std()),
    )


def cluster_directions(data: DataMatrix, rows) -> np.ndarray:
    """Right singular vectors of the row-centered cluster submatrix.

    Returns a full orthonormal d x d basis (rows are directions), so
    rank-deficient clusters still yield d valid directions. Each vector's
    largest-magnitude entry is forced positive for reproducibility.
    """
    rows = _check_rows(data.n, rows)
    sub = data.values[rows]
    centered = sub - sub.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=True)
    for j in range(vt.shape[0]):
        i = int(np.argmax(np.abs(vt[j])))
        if vt[j, i] < 0:
            vt[j] = -vt[j]
    return vt


@dataclass(frozen=True)
class CompositeConstraint:
    """A user-level constraint and the primitives it expanded into."""

    variant: str  # "margin" | "cluster" | "one_cluster" | "two_d"
    rows: np.ndarray | None
    directions: np.ndarray | None  # only for two_d
    expansion: tuple[PrimitiveConstraint, ...]

    def __post_init__(self):
        if self.rows is not None:
            self.rows.flags.writeable = False
        if self.directions is not None:
            self.directions.flags.writeable = False


def _expand_directions(data: DataMatrix, rows, directions) -> list[PrimitiveConstraint]:
    out = []
    for w in directions:
        out.append(make_primitive(data, "linear", rows, w))
        out.append(make_primitive(data, "quadratic", rows, w))
    return out


def expand_composite(
    data: DataMatrix,
    variant: str,
    rows=None,
    directions=None,
) -> CompositeConstraint:
    """Expand a user-level constraint into primitives with evaluated targets.

    margin        -> linear + quadratic per standard-basis column (2d primitives)
    cluster       -> linear + quadratic per singular direction of the row
                     subset (2d primitives); requires ``rows``
    one_cluster   -> cluster over all rows
    two_d         -> linear + quadratic for each of the two given orthogonal
                     directions (4 primitives); requires ``rows`` and
                     ``directions``
    """
    n, d = data.n, data.d
    if variant == "margin":
        prims = _expand_directions(data, np.arange(n), np.eye(d))
        return CompositeConstraint("margin", None, None, tuple(prims))
    if variant == "one_cluster":
        rows = np.arange(n)
        variant = "cluster"
        dirs = cluster_directions(data, rows)
        prims = _expand_directions(data, rows, dirs)
        return CompositeConstraint("one_cluster", None, None, tuple(prims))
    if variant == "cluster":
        rows = _check_rows(n, rows)
        dirs = cluster_directions(data, rows)
        prims = _expand_directions(data, rows, dirs)
        return CompositeConstraint("cluster", rows, None, tuple(prims))
    if variant == "two_d":
        rows = _check_rows(n, rows)
        if directions is None:
            raise InvalidConstraintError("two_d constraint needs two directions")
        dirs = np.asarray(directions, dtype=np.float64)
        if dirs.shape != (2, d):
            raise InvalidConstraintError(f"two_d directions must be 2x{d}, got {dirs.shape}")
        w1, w2 = dirs
        if abs(float(w1 @ w2)) > ORTHOGONALITY_TOL * np.linalg.norm(w1) * np.linalg.norm(w2):
            raise InvalidConstraintError("two_d directions are not orthogonal")
        prims = _expand_directions(data, rows, dirs)
        return CompositeConstraint("two_d", rows, dirs, tuple(prims))
    raise InvalidConstraintError(f"unknown composite variant {variant!r}")


def dedupe_primitives(
    existing: list[PrimitiveConstraint],
    candidates,
) -> list[PrimitiveConstraint]:
    """Return the candidates that are not already present.

    Duplicates (same kind, rows and direction within tolerance) stall the
    coordinate ascent without moving the optimum, so they are dropped when
    constraints are registered.
    """
    fresh: list[PrimitiveConstraint] = []
    for cand in candidates:
        if any(cand.matches(prev) for prev in existing) or any(
            cand.matches(prev) for prev in fresh
        ):
            continue
        fresh.append(cand)
    return fresh
