"""Whitening against the background model and sampling from it.

Each row is mapped through its class's symmetric inverse square root,

    y_i = U D^{1/2} U' (x_i - m_i),   Sigma_i^{-1} = U D U',

which sends model-conforming data to a unit spherical Gaussian while keeping
the result in a direction comparable across rows (the final rotation back).
Any remaining structure in the whitened data is exactly what the model does
not explain yet.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DataMatrix
from .errors import StaleModelError
from .model import BackgroundModel, SIGMA_EIG_FLOOR

__all__ = ["WhitenedMatrix", "whiten", "whiten_values", "sample_background"]

# Collapsed directions: a deviation over vanished variance is clipped here
# instead of overflowing; a vanished deviation maps to zero.
COMPONENT_CLIP = 1e6
DEVIATION_EPS = 1e-9


@dataclass(frozen=True)
class WhitenedMatrix:
    values: np.ndarray  # (n, d)
    source_model_version: int

    def __post_init__(self):
        self.values.flags.writeable = False

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def _check_ready(model: BackgroundModel):
    if model.fit_status == "in_progress":
        raise StaleModelError("model fit in progress; wait for it to finish")


def whiten_values(values: np.ndarray, model: BackgroundModel) -> np.ndarray:
    """Whiten an (n, d) array row-aligned with the model's partition."""
    _check_ready(model)
    if len(model.constraints) == 0:
        # Unconstrained model is the unit Gaussian: the transform is exact identity.
        return values.copy()
    out = np.empty_like(values, dtype=np.float64)
    for c in range(model.n_classes):
        rows = model.partition.rows_of_class(c)
        evals, evecs = np.linalg.eigh(model.cov[c])
        dev = (values[rows] - model.mean[c]) @ evecs
        comp = dev / np.sqrt(np.clip(evals, SIGMA_EIG_FLOOR, None))
        comp = np.clip(comp, -COMPONENT_CLIP, COMPONENT_CLIP)
        dead = (evals <= SIGMA_EIG_FLOOR)[None, :] & (np.abs(dev) <= DEVIATION_EPS)
        comp[dead] = 0.0
        out[rows] = comp @ evecs.T
    return out


def whiten(data: DataMatrix, model: BackgroundModel) -> WhitenedMatrix:
    """Whiten the dataset against the model's per-class Gaussians."""
    if data.n != model.partition.n:
        raise ValueError(f"data has {data.n} rows, model partition {model.partition.n}")
    return WhitenedMatrix(whiten_values(data.values, model), model.version)


def sample_background(model: BackgroundModel, seed: int) -> np.ndarray:
    """Draw one synthetic dataset from the model, row i from row i's class.

    Deterministic for a given seed: classes are visited in index order and
    rows within a class in ascending row order.
    """
    _check_ready(model)
    rng = np.random.default_rng(seed)
    n = model.partition.n
    out = np.empty((n, model.d))
    for c in range(model.n_classes):
        rows = model.partition.rows_of_class(c)
        evals, evecs = np.linalg.eigh(model.cov[c])
        sd = np.sqrt(np.clip(evals, 0.0, None))
        z = rng.standard_normal((rows.size, model.d))
        out[rows] = model.mean[c] + (z * sd) @ evecs.T
    return out
