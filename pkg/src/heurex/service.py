"""HTTP face of the engine. Sessions live in process memory; every response
is derived from session state plus the configured transport."""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .design_tree import document_from_obj, document_to_obj
from .errors import HeurexError
from .guidelines import builtin_sets, resolve_sets
from .pipeline import PipelineStageError, generate_labels
from .report import build_report, report_to_obj
from .session import (
    AlreadyDismissedError,
    SessionState,
    UnknownSuggestionError,
    _round_to_obj,
    _set_to_obj,
    create_session,
    dismiss,
    run_round,
)
from .transport import CompletionParams, CompletionTransport, HttpTransport, TransportError


class UnknownSessionError(HeurexError, KeyError):
    def __init__(self, session_id: str):
        super().__init__(f"no session with id {session_id!r}")
        self.session_id = session_id


class SessionStore:
    """In-memory session map with one lock per session, so concurrent calls
    against the same session serialize instead of interleaving."""

    def __init__(self):
        self._sessions: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def add(self, session: SessionState) -> None:
        with self._guard:
            self._sessions[session.session_id] = session
            self._locks[session.session_id] = threading.Lock()

    def get(self, session_id: str) -> SessionState:
        with self._guard:
            if session_id not in self._sessions:
                raise UnknownSessionError(session_id)
            return self._sessions[session_id]

    def lock(self, session_id: str) -> threading.Lock:
        with self._guard:
            if session_id not in self._locks:
                raise UnknownSessionError(session_id)
            return self._locks[session_id]


class CreateSessionBody(BaseModel):
    design: dict
    guidelines: list[str] = Field(default_factory=list)
    custom_guidelines: str | None = None
    engine: str = "llm"
    budget: int = 8100
    suppress_node_repeats: bool = False
    session_id: str | None = None


class RunRoundBody(BaseModel):
    design: dict | None = None


class LabelsBody(BaseModel):
    design: dict


def create_app(
    transport: CompletionTransport | None = None,
    params: CompletionParams | None = None,
    store: SessionStore | None = None,
) -> FastAPI:
    app = FastAPI(title="heurex", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    sessions = store if store is not None else SessionStore()
    default_params = params or CompletionParams()

    def get_transport() -> CompletionTransport:
        nonlocal transport
        if transport is None:
            transport = HttpTransport.from_env()
        return transport

    @app.exception_handler(HeurexError)
    async def handle_heurex_error(request: Request, exc: HeurexError):
        payload: dict = {"error": str(exc), "type": type(exc).__name__}
        if isinstance(exc, (UnknownSessionError, UnknownSuggestionError)):
            status = 404
        elif isinstance(exc, AlreadyDismissedError):
            status = 409
        elif isinstance(exc, PipelineStageError):
            status = 502
            payload["stage"] = exc.stage
        elif isinstance(exc, TransportError):
            status = 502
            payload["stage"] = "transport"
        else:
            # Validation problems: bad design JSON, bad guideline selection,
            # bad engine name, budget overruns.
            status = 400
        return JSONResponse(status_code=status, content=payload)

    @app.get("/guidelines")
    def get_guidelines():
        return {"sets": [_set_to_obj(s) for s in builtin_sets()]}

    @app.post("/sessions", status_code=201)
    def post_session(body: CreateSessionBody):
        doc = document_from_obj(body.design)
        sets = resolve_sets(body.guidelines, body.custom_guidelines)
        session = create_session(
            doc,
            sets,
            engine=body.engine,
            budget=body.budget,
            params=default_params,
            suppress_node_repeats=body.suppress_node_repeats,
            session_id=body.session_id,
        )
        sessions.add(session)
        return {"session_id": session.session_id}

    @app.post("/sessions/{session_id}/rounds")
    def post_round(session_id: str, body: RunRoundBody | None = None):
        session = sessions.get(session_id)
        updated = None
        if body is not None and body.design is not None:
            updated = document_from_obj(body.design)
        with sessions.lock(session_id):
            rnd = run_round(session, updated, get_transport())
            return report_to_obj(build_report(session, rnd))

    @app.post("/sessions/{session_id}/suggestions/{suggestion_id}/dismiss")
    def post_dismiss(session_id: str, suggestion_id: str):
        session = sessions.get(session_id)
        with sessions.lock(session_id):
            record = dismiss(session, suggestion_id, get_transport())
        return {
            "suggestion_id": record.suggestion_id,
            "status": "dismissed",
            "round_number": record.round_number,
            "missing_node_ids": list(record.missing_node_ids),
        }

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = sessions.get(session_id)
        with sessions.lock(session_id):
            return {
                "session_id": session.session_id,
                "engine": session.engine,
                "budget": session.budget,
                "suppress_node_repeats": session.suppress_node_repeats,
                "sets": [_set_to_obj(s) for s in session.sets],
                "document": document_to_obj(session.document),
                "rounds": [_round_to_obj(r) for r in session.rounds],
                "dismissals": [
                    {
                        "suggestion_id": d.suggestion_id,
                        "round_number": d.round_number,
                        "timestamp": d.timestamp,
                        "missing_node_ids": list(d.missing_node_ids),
                    }
                    for d in session.dismissals
                ],
            }

    @app.post("/labels")
    def post_labels(body: LabelsBody):
        doc = document_from_obj(body.design)
        return {"labels": generate_labels(doc, get_transport(), default_params)}

    return app


__all__ = [
    "CreateSessionBody",
    "LabelsBody",
    "RunRoundBody",
    "SessionStore",
    "UnknownSessionError",
    "create_app",
]
