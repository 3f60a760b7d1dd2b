"""Interactive exploration sessions.

A session owns one dataset, the constraints the user has marked so far, the
background model fitted to them, and the current projection. Time-consuming
work (refitting the model, recomputing a view) happens only on explicit
calls; a fit runs on a worker thread with pollable progress and cooperative
cancellation. Mutations on one session are serialized by its lock.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .constraints import CompositeConstraint, dedupe_primitives, expand_composite
from .data import DataMatrix, standardize
from .errors import (
    DegenerateDataError,
    FitInProgressError,
    InvalidConstraintError,
    StaleModelError,
    UnknownGroupingError,
)
from .fit import fit
from .model import BackgroundModel, FitConfig, init_model
from .partition import build_partition
from .views import ProjectionView, _orthonormal_pair, ica_view, pca_view
from .whitening import sample_background, whiten, whiten_values

__all__ = [
    "SessionSettings",
    "AttributeStats",
    "SelectionStats",
    "Ellipse",
    "Session",
    "selection_stats",
    "confidence_ellipse",
]

STD_FLOOR = 1e-12


@dataclass(frozen=True)
class SessionSettings:
    fit: FitConfig = field(default_factory=FitConfig)
    view_method: str = "pca"
    sample_seed: int = 7
    ica_seed: int = 11
    scale_columns: bool = True


@dataclass(frozen=True)
class AttributeStats:
    name: str
    mean_selected: float
    std_selected: float
    mean_rest: float
    std_rest: float
    score: float


@dataclass(frozen=True)
class SelectionStats:
    """How the selected rows differ from the rest, attribute by attribute."""

    count: int
    attributes: tuple[AttributeStats, ...]  # ranked by score, descending
    jaccard: dict[str, float]  # class label -> overlap with the selection
    rest_empty: bool = False


def selection_stats(data: DataMatrix, rows) -> SelectionStats:
    """Rank attributes by how strongly the selection differs from the rest.

    The score combines standardized mean separation with the magnitude of the
    log std ratio, so both location and scale differences surface. When the
    selection covers every row there is nothing to compare against: scores
    are zero and the result is flagged.
    """
    rows = np.unique(np.asarray(rows, dtype=np.intp))
    if rows.size == 0:
        raise InvalidConstraintError("selection is empty")
    mask = np.zeros(data.n, dtype=bool)
    mask[rows] = True
    sel, rest = data.values[mask], data.values[~mask]
    rest_empty = rest.shape[0] == 0

    stats = []
    for j, name in enumerate(data.column_names):
        m_sel, s_sel = float(sel[:, j].mean()), float(sel[:, j].std())
        if rest_empty:
            m_rest, s_rest, score = m_sel, s_sel, 0.0
        else:
            m_rest, s_rest = float(rest[:, j].mean()), float(rest[:, j].std())
            pooled = np.sqrt(
                (sel.shape[0] * s_sel**2 + rest.shape[0] * s_rest**2) / data.n
            )
            loc = abs(m_sel - m_rest) / pooled if pooled > STD_FLOOR else 0.0
            scale = abs(np.log(max(s_sel, STD_FLOOR) / max(s_rest, STD_FLOOR)))
            score = float(loc + scale)
        stats.append(AttributeStats(name, m_sel, s_sel, m_rest, s_rest, score))
    stats.sort(key=lambda a: -a.score)

    jaccard = {}
    if data.class_labels is not None:
        labels = np.asarray(data.class_labels, dtype=object)
        for label in sorted(set(data.class_labels)):
            cls = labels == label
            union = np.count_nonzero(mask | cls)
            jaccard[label] = float(np.count_nonzero(mask & cls) / union) if union else 0.0

    return SelectionStats(int(rows.size), tuple(stats), jaccard, rest_empty)


@dataclass(frozen=True)
class Ellipse:
    """Confidence ellipse of a 2-D point cloud: center, axis lengths, angle."""

    center: tuple[float, float]
    axis_lengths: tuple[float, float]  # major, minor
    angle: float  # radians, direction of the major axis


def confidence_ellipse(points: np.ndarray, level: float = 0.95) -> Ellipse:
    """Ellipse covering ``level`` probability of a Gaussian fitted to the points.

    Axis lengths are sqrt(chi2_2 quantile x eigenvalue) of the sample
    covariance. A degenerate covariance collapses the minor axis to zero
    rather than failing.
    """
    from scipy import stats as sstats

    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 2:
        raise ValueError(f"expected (m, 2) points, got {points.shape}")
    if points.shape[0] < 3:
        raise DegenerateDataError("confidence ellipse needs at least 3 points")
    if not 0.0 < level < 1.0:
        raise ValueError("level must be inside (0, 1)")
    center = points.mean(axis=0)
    cov = np.cov(points, rowvar=False)
    evals, evecs = np.linalg.eigh(cov)
    evals = np.clip(evals, 0.0, None)
    quantile = float(sstats.chi2.ppf(level, df=2))
    major, minor = np.sqrt(quantile * evals[::-1])
    principal = evecs[:, 1]
    return Ellipse(
        center=(float(center[0]), float(center[1])),
        axis_lengths=(float(major), float(minor)),
        angle=float(np.arctan2(principal[1], principal[0])),
    )


@dataclass
class FitJob:
    state: str = "running"  # running | done | error
    started: float = field(default_factory=time.perf_counter)
    error: str | None = None
    cancel_event: threading.Event = field(default_factory=threading.Event)
    thread: threading.Thread | None = None


class Session:
    """One user's exploration loop over one dataset."""

    def __init__(self, data: DataMatrix, settings: SessionSettings | None = None,
                 session_id: str = "s0"):
        if data.n < 3:
            raise DegenerateDataError(f"a session needs at least 3 rows, got {data.n}")
        if data.d < 2:
            raise DegenerateDataError(f"a session needs at least 2 columns, got {data.d}")
        self.id = session_id
        self.settings = settings or SessionSettings()
        self.data = standardize(data) if self.settings.scale_columns else data
        self._row_index = {rid: i for i, rid in enumerate(self.data.row_ids)}
        self.composites: list[CompositeConstraint] = []
        self.primitives: list = []
        self.model_version = 0
        self.model: BackgroundModel = self._fresh_model()
        self.current_view: ProjectionView | None = None
        self.selection: tuple[str, ...] = ()
        self.groupings: dict[str, tuple[str, ...]] = {}
        self.fit_log: list[str] = []
        self._job: FitJob | None = None
        self._lock = threading.RLock()
        self.current_view = self.compute_view(self.settings.view_method)

    # -- internals ---------------------------------------------------------

    def _fresh_model(self) -> BackgroundModel:
        partition = build_partition(self.data.n, self.primitives)
        model = init_model(
            partition, self.primitives, self.data.d,
            data_scale=float(self.data.values.std()),
        )
        model.version = self.model_version
        return model

    def _rows_from_ids(self, row_ids) -> np.ndarray:
        try:
            idx = [self._row_index[rid] for rid in row_ids]
        except KeyError as exc:
            raise KeyError(f"unknown row id {exc.args[0]!r}") from None
        return np.unique(np.asarray(idx, dtype=np.intp))

    def _ids_from_rows(self, rows) -> tuple[str, ...]:
        return tuple(self.data.row_ids[i] for i in np.sort(np.asarray(rows, dtype=np.intp)))

    def _fit_running(self) -> bool:
        return self._job is not None and self._job.state == "running"

    # -- selection and groupings --------------------------------------------

    def set_selection(self, row_ids) -> int:
        with self._lock:
            rows = self._rows_from_ids(row_ids)
            self.selection = self._ids_from_rows(rows)
            return len(self.selection)

    def selection_stats(self, row_ids=None) -> SelectionStats:
        ids = self.selection if row_ids is None else tuple(row_ids)
        if not ids:
            raise InvalidConstraintError("selection is empty")
        return selection_stats(self.data, self._rows_from_ids(ids))

    def save_grouping(self, name: str, row_ids) -> None:
        with self._lock:
            rows = self._rows_from_ids(row_ids)
            self.groupings[str(name)] = self._ids_from_rows(rows)

    def load_grouping(self, name: str) -> tuple[str, ...]:
        """Saved groupings first, then predefined class labels."""
        if name in self.groupings:
            return self.groupings[name]
        if self.data.class_labels is not None:
            rows = self.data.label_rows(name)
            if rows.size:
                return self._ids_from_rows(rows)
        raise UnknownGroupingError(name)

    def grouping_names(self) -> list[str]:
        names = set(self.groupings)
        if self.data.class_labels is not None:
            names.update(self.data.class_labels)
        return sorted(names)

    # -- constraints ---------------------------------------------------------

    def _pullback_view_directions(self) -> np.ndarray:
        """Map the current view plane into data space.

        Whitening is row-dependent, so the exact preimage is ill-defined; the
        least-squares directions best reproducing the view coordinates are
        deterministic and reduce to the view directions themselves when the
        model is unconstrained.
        """
        if self.current_view is None:
            raise StaleModelError("no current view to take directions from")
        coeffs, *_ = np.linalg.lstsq(self.data.values, self.current_view.data_points, rcond=None)
        return _orthonormal_pair(coeffs).T

    def add_constraint(self, variant: str, row_ids=None) -> dict:
        with self._lock:
            if self._fit_running():
                raise FitInProgressError("cannot change constraints while a fit is running")
            variant = variant.replace("-", "_")
            rows = None
            directions = None
            if variant in ("cluster", "two_d"):
                ids = tuple(row_ids) if row_ids is not None else self.selection
                if not ids:
                    raise InvalidConstraintError(f"{variant} constraint needs a nonempty selection")
                rows = self._rows_from_ids(ids)
            if variant == "two_d":
                directions = self._pullback_view_directions()
            composite = expand_composite(self.data, variant, rows=rows, directions=directions)
            fresh = dedupe_primitives(self.primitives, composite.expansion)
            if fresh:
                self.composites.append(composite)
                self.primitives.extend(fresh)
                self.model_version += 1
                self.model = self._fresh_model()
            return {
                "composites": len(self.composites),
                "primitives": len(self.primitives),
                "added": len(fresh),
                "model_version": self.model_version,
            }

    # -- fitting --------------------------------------------------------------

    def update_background(self) -> dict:
        """Refit the background model on a worker thread."""
        with self._lock:
            if self._fit_running():
                raise FitInProgressError("a fit is already running for this session")
            job = FitJob()
            self._job = job
            self.fit_log = []

            def observe(record):
                self.fit_log.append(record.line())

            def run():
                try:
                    fit(self.model, self.settings.fit, progress=observe,
                        cancel=job.cancel_event)
                    with self._lock:
                        self.model_version += 1
                        self.model.version = self.model_version
                        self.current_view = None
                        job.state = "done"
                except Exception as exc:  # surfaced through fit_state
                    job.error = f"{type(exc).__name__}: {exc}"
                    job.state = "error"

            job.thread = threading.Thread(target=run, daemon=True)
            job.thread.start()
            return self.fit_state()

    def wait_for_fit(self, timeout: float | None = None) -> dict:
        job = self._job
        if job is not None and job.thread is not None:
            job.thread.join(timeout)
        return self.fit_state()

    def cancel_fit(self) -> bool:
        job = self._job
        if job is None or job.state != "running":
            return False
        job.cancel_event.set()
        return True

    def fit_state(self) -> dict:
        job = self._job
        diag = self.model.diagnostics
        out = {
            "state": "idle" if job is None else job.state,
            "fit_status": self.model.fit_status,
            "model_version": self.model_version,
            "constraints": len(self.primitives),
            "log_tail": self.fit_log[-5:],
        }
        if job is not None and job.error:
            out["error"] = job.error
        if diag is not None and job is not None and job.state == "done":
            out["sweeps"] = diag.sweeps
            out["converged_by"] = diag.converged_by
            if diag.residuals is not None and diag.residuals.size:
                out["max_residual"] = float(diag.residuals.max())
        return out

    # -- views ------------------------------------------------------------------

    def compute_view(self, method: str | None = None) -> ProjectionView:
        """Whiten, sample, score directions and project data plus sample."""
        with self._lock:
            if self._fit_running():
                raise StaleModelError("model update in progress; try again when it finishes")
            if self.primitives and self.model.fit_status == "unfitted":
                raise StaleModelError("constraints changed; run update_background first")
            method = (method or self.settings.view_method).lower()
            white = whiten(self.data, self.model)
            sample = sample_background(self.model, self.settings.sample_seed + self.model.version)
            background = whiten_values(sample, self.model)
            if method == "pca":
                view = pca_view(white, background=background)
            elif method == "ica":
                view = ica_view(white, seed=self.settings.ica_seed, background=background)
            else:
                raise ValueError(f"unknown view method {method!r}")
            self.current_view = view
            return view

    def view_payload(self) -> dict:
        """Current view as a flat record set plus scores, for the wire."""
        view = self.current_view
        if view is None:
            raise StaleModelError("no current view; recompute one")
        selected = set(self.selection)
        records = []
        for i, rid in enumerate(self.data.row_ids):
            records.append(
                {
                    "row_id": rid,
                    "data_x": float(view.data_points[i, 0]),
                    "data_y": float(view.data_points[i, 1]),
                    "bg_x": float(view.background_points[i, 0]),
                    "bg_y": float(view.background_points[i, 1]),
                    "selected": rid in selected,
                }
            )
        return {
            "method": view.method,
            "model_version": view.model_version,
            "stale": view.model_version < self.model_version,
            "scores": list(view.scores),
            "directions": view.directions.T.tolist(),
            "warning_flags": list(view.warning_flags),
            "points": records,
        }

    def selection_ellipses(self, level: float = 0.95) -> dict:
        """Confidence ellipses of the selected points and their background twins."""
        view = self.current_view
        if view is None:
            raise StaleModelError("no current view")
        rows = self._rows_from_ids(self.selection)
        if rows.size < 3:
            raise DegenerateDataError("need at least 3 selected points for ellipses")
        return {
            "selection": asdict(confidence_ellipse(view.data_points[rows], level)),
            "background": asdict(confidence_ellipse(view.background_points[rows], level)),
        }

    # -- persistence --------------------------------------------------------------

    def export_archive(self) -> bytes:
        """Canonical JSON snapshot of the session.

        Contains everything needed to replay the session (data, settings,
        constraint history, groupings, seeds) plus the current view; wall
        times and other non-deterministic measurements are deliberately
        excluded so a replayed session exports byte-identical bytes.
        """
        with self._lock:
            fitcfg = asdict(self.settings.fit)
            composites = []
            for comp in self.composites:
                entry: dict = {"variant": comp.variant}
                if comp.rows is not None:
                    entry["rows"] = list(self._ids_from_rows(comp.rows))
                if comp.directions is not None:
                    entry["directions"] = comp.directions.tolist()
                composites.append(entry)
            archive = {
                "format": "maxlens-session/1",
                "settings": {
                    "fit": fitcfg,
                    "view_method": self.settings.view_method,
                    "sample_seed": self.settings.sample_seed,
                    "ica_seed": self.settings.ica_seed,
                    "scale_columns": self.settings.scale_columns,
                },
                "data": {
                    "column_names": list(self.data.column_names),
                    "row_ids": list(self.data.row_ids),
                    "class_labels": list(self.data.class_labels) if self.data.class_labels else None,
                    "values": self.data.values.tolist(),
                },
                "composites": composites,
                "groupings": {k: list(v) for k, v in sorted(self.groupings.items())},
                "selection": list(self.selection),
                "model": {
                    "version": self.model_version,
                    "fit_status": self.model.fit_status,
                    "constraints": len(self.primitives),
                },
                "view": self.view_payload() if self.current_view is not None else None,
            }
        return json.dumps(archive, sort_keys=True, separators=(",", ":")).encode()
