"""Most-informative 2-D projections of whitened data.

If the model explained the data perfectly, its whitened version would be a
unit spherical Gaussian; the view search looks for the directions where that
fails hardest. PCA scores each principal component by how far its variance
sits from one, (var - log var - 1)/2, which is zero exactly at unit variance
and positive on both sides. ICA scores components by log-cosh
non-Gaussianity, which also catches structure with unit variance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError
from .fastica import fastica
from .whitening import WhitenedMatrix

__all__ = ["ProjectionView", "pca_view", "ica_view", "project", "pca_component_score"]

VARIANCE_SCORE_FLOOR = 1e-18
MAX_ICA_COMPONENTS = 20


@dataclass(frozen=True)
class ProjectionView:
    """Two scored directions plus the projected data and background sample."""

    method: str  # "pca" | "ica"
    directions: np.ndarray  # (d, 2), orthonormal columns
    scores: tuple[float, ...]  # every computed component, sorted by |score| desc
    data_points: np.ndarray  # (n, 2)
    background_points: np.ndarray | None  # (n, 2), row-aligned with data_points
    model_version: int
    warning_flags: tuple[str, ...] = ()

    def __post_init__(self):
        self.directions.flags.writeable = False
        self.data_points.flags.writeable = False
        if self.background_points is not None:
            self.background_points.flags.writeable = False

    def top_score(self) -> float:
        return max(abs(s) for s in self.scores)


def pca_component_score(variance: float) -> float:
    """Distance of a component variance from unity: (var - log var - 1)/2."""
    v = max(variance, VARIANCE_SCORE_FLOOR)
    return 0.5 * (v - np.log(v) - 1.0)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Force each column's largest-magnitude entry positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        i = int(np.argmax(np.abs(out[:, j])))
        if out[i, j] < 0:
            out[:, j] = -out[:, j]
    return out


def _orthonormal_pair(dirs: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the plane spanned by two direction columns."""
    q, r = np.linalg.qr(dirs)
    for j in range(2):
        if r[j, j] < 0:
            q[:, j] = -q[:, j]
    return _fix_signs(q)


def _check_input(whitened: WhitenedMatrix):
    n, d = whitened.values.shape
    if n < 3:
        raise DegenerateDataError(f"projection needs at least 3 rows, got {n}")
    if d < 2:
        raise DegenerateDataError(f"projection needs at least 2 columns, got {d}")


def pca_view(
    whitened: WhitenedMatrix,
    background: np.ndarray | None = None,
) -> ProjectionView:
    """Principal components of the whitened data, ranked by variance-gap score."""
    _check_input(whitened)
    Y = whitened.values
    Yc = Y - Y.mean(axis=0)
    cov = Yc.T @ Yc / Y.shape[0]
    evals, evecs = np.linalg.eigh(cov)
    if float(evals.max(initial=0.0)) <= 0.0:
        raise DegenerateDataError("whitened data has zero variance")
    scores = np.array([pca_component_score(v) for v in evals])
    order = np.argsort(-np.abs(scores), kind="stable")
    directions = _fix_signs(evecs[:, order[:2]])
    return ProjectionView(
        method="pca",
        directions=directions,
        scores=tuple(float(s) for s in scores[order]),
        data_points=Y @ directions,
        background_points=None if background is None else background @ directions,
        model_version=whitened.source_model_version,
    )


def ica_view(
    whitened: WhitenedMatrix,
    seed: int,
    n_components: int | None = None,
    background: np.ndarray | None = None,
    max_iter: int = 200,
) -> ProjectionView:
    """Independent components of the whitened data, ranked by |log-cosh score|.

    The two top-scoring components span the view plane; their directions are
    orthonormalized so the projection is a proper rotation of that plane.
    """
    _check_input(whitened)
    if n_components is None:
        n_components = min(whitened.d, MAX_ICA_COMPONENTS)
    directions, scores, converged = fastica(
        whitened.values, n_components, seed=seed, max_iter=max_iter
    )
    if directions.shape[1] < 2:
        raise DegenerateDataError("fewer than 2 independent components available")
    pair = _orthonormal_pair(directions[:, :2])
    return ProjectionView(
        method="ica",
        directions=pair,
        scores=tuple(float(s) for s in scores),
        data_points=whitened.values @ pair,
        background_points=None if background is None else background @ pair,
        model_version=whitened.source_model_version,
        warning_flags=() if converged else ("ica_not_converged",),
    )


def project(points: np.ndarray, view: ProjectionView) -> np.ndarray:
    """Project points onto the view plane; same map for data and background."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != view.directions.shape[0]:
        raise ValueError(
            f"points of shape {points.shape} do not match view dimension {view.directions.shape[0]}"
        )
    return points @ view.directions
