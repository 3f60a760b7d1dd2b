"""JSON-over-HTTP session service.

One process serves many sessions; each holds its own lock, so requests for
different sessions run freely in parallel while mutations within a session
serialize. Fits run on worker threads and are polled through the status
endpoint.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .data import parse_csv
from .errors import (
    DegenerateDataError,
    FitInProgressError,
    IngestError,
    InvalidConstraintError,
    StaleModelError,
    UnknownGroupingError,
)
from .model import FitConfig
from .session import Session, SessionSettings

__all__ = ["SessionStore", "create_app"]


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._counter = 0
        self._lock = threading.Lock()

    def create(self, data, settings: SessionSettings) -> Session:
        with self._lock:
            sid = f"s{self._counter}"
            self._counter += 1
            session = Session(data, settings, session_id=sid)
            self._sessions[sid] = session
            return session

    def get(self, sid: str) -> Session:
        try:
            return self._sessions[sid]
        except KeyError:
            raise UnknownSessionError(sid) from None


class UnknownSessionError(KeyError):
    pass


class SelectionBody(BaseModel):
    row_ids: list[str]


class ConstraintBody(BaseModel):
    variant: str
    rows: list[str] | None = None


class GroupingBody(BaseModel):
    name: str
    row_ids: list[str]


def create_app(store: SessionStore | None = None) -> FastAPI:
    store = store or SessionStore()
    app = FastAPI(title="maxlens session service")
    app.state.store = store

    def handler(status: int):
        def handle(_req: Request, exc: Exception):
            return JSONResponse(status_code=status, content={"detail": str(exc)})

        return handle

    app.add_exception_handler(IngestError, handler(400))
    app.add_exception_handler(InvalidConstraintError, handler(400))
    app.add_exception_handler(DegenerateDataError, handler(400))
    app.add_exception_handler(ValueError, handler(400))
    app.add_exception_handler(KeyError, handler(404))
    app.add_exception_handler(UnknownGroupingError, handler(404))
    app.add_exception_handler(UnknownSessionError, handler(404))
    app.add_exception_handler(StaleModelError, handler(409))
    app.add_exception_handler(FitInProgressError, handler(409))

    def summary(session: Session) -> dict:
        return {
            "id": session.id,
            "n": session.data.n,
            "d": session.data.d,
            "columns": list(session.data.column_names),
            "has_labels": session.data.class_labels is not None,
            "model_version": session.model_version,
            "constraints": len(session.primitives),
            "composites": len(session.composites),
        }

    @app.post("/sessions", status_code=201)
    async def create_session(
        request: Request,
        label_column: str | None = Query(default=None),
        scale_columns: bool = Query(default=True),
        view_method: str = Query(default="pca"),
        sample_seed: int = Query(default=7),
        ica_seed: int = Query(default=11),
        time_budget: float = Query(default=10.0),
        lambda_tolerance: float = Query(default=1e-2),
        moment_tolerance: float = Query(default=1e-2),
    ):
        body = (await request.body()).decode("utf-8")
        data = parse_csv(body, label_column=label_column)
        settings = SessionSettings(
            fit=FitConfig(
                lambda_tolerance=lambda_tolerance,
                moment_tolerance=moment_tolerance,
                time_budget=time_budget,
            ),
            view_method=view_method,
            sample_seed=sample_seed,
            ica_seed=ica_seed,
            scale_columns=scale_columns,
        )
        session = store.create(data, settings)
        return summary(session)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return summary(store.get(sid))

    @app.get("/sessions/{sid}/view")
    def get_view(sid: str, method: str | None = Query(default=None)):
        session = store.get(sid)
        if method is not None or session.current_view is None:
            session.compute_view(method)
        return session.view_payload()

    @app.post("/sessions/{sid}/selection")
    def post_selection(sid: str, body: SelectionBody):
        count = store.get(sid).set_selection(body.row_ids)
        return {"count": count}

    @app.get("/sessions/{sid}/selection/stats")
    def get_selection_stats(sid: str):
        stats = store.get(sid).selection_stats()
        return {
            "count": stats.count,
            "rest_empty": stats.rest_empty,
            "attributes": [
                {
                    "name": a.name,
                    "mean_selected": a.mean_selected,
                    "std_selected": a.std_selected,
                    "mean_rest": a.mean_rest,
                    "std_rest": a.std_rest,
                    "score": a.score,
                }
                for a in stats.attributes
            ],
            "jaccard": stats.jaccard,
        }

    @app.get("/sessions/{sid}/selection/ellipses")
    def get_selection_ellipses(sid: str, level: float = Query(default=0.95)):
        return store.get(sid).selection_ellipses(level)

    @app.post("/sessions/{sid}/constraints")
    def post_constraint(sid: str, body: ConstraintBody):
        return store.get(sid).add_constraint(body.variant, body.rows)

    @app.post("/sessions/{sid}/fit", status_code=202)
    def post_fit(sid: str):
        return store.get(sid).update_background()

    @app.get("/sessions/{sid}/fit/status")
    def get_fit_status(sid: str):
        return store.get(sid).fit_state()

    @app.post("/sessions/{sid}/fit/cancel")
    def post_fit_cancel(sid: str):
        return {"cancelled": store.get(sid).cancel_fit()}

    @app.post("/sessions/{sid}/groupings", status_code=201)
    def post_grouping(sid: str, body: GroupingBody):
        session = store.get(sid)
        session.save_grouping(body.name, body.row_ids)
        return {"name": body.name, "count": len(session.groupings[body.name])}

    @app.get("/sessions/{sid}/groupings")
    def get_groupings(sid: str):
        return {"names": store.get(sid).grouping_names()}

    @app.get("/sessions/{sid}/groupings/{name}")
    def get_grouping(sid: str, name: str):
        return {"name": name, "row_ids": list(store.get(sid).load_grouping(name))}

    @app.get("/sessions/{sid}/export")
    def get_export(sid: str):
        return Response(content=store.get(sid).export_archive(), media_type="application/json")

    return app
