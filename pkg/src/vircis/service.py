"""HTTP/JSON boundary over sessions, recognition, and search.

Responses are built with fixed key order so repeated snapshots are
byte-stable; merged entries serialize as {doc_id, score, contributors}.
"""

from __future__ import annotations

import io
import threading
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .audio import load_wav
from .errors import (AudioFormatError, ConfigurationError, SessionConflictError,
                     SessionNotFoundError, UnsupportedAudioError, VircisError)
from .frontend import FrameSpec, MfccConfig
from .recognizer import Vocabulary
from .retrieval import InvertedIndex, RankedList
from .session import (MergedResult, RelevanceFilterConfig, Session,
                      create_session, transcribe_clip)


@dataclass
class ServiceSettings:
    index: InvertedIndex
    vocab: Optional[Vocabulary] = None
    frame_spec: FrameSpec = field(default_factory=FrameSpec)
    mfcc_config: MfccConfig = field(default_factory=MfccConfig)
    filter_config: RelevanceFilterConfig = field(default_factory=RelevanceFilterConfig)
    top_k: int = 10
    silence_threshold: float = 0.01
    min_silence_ms: float = 200.0


class SessionRegistry:
    def __init__(self, config: RelevanceFilterConfig):
        self._config = config
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, session_id: str) -> Session:
        with self._lock:
            if session_id in self._sessions:
                raise SessionConflictError(f"session {session_id!r} already exists")
            session = create_session(session_id, self._config)
            self._sessions[session_id] = session
            return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise SessionNotFoundError(f"no session {session_id!r}") from None


class BadRequest(VircisError):
    """Request body is missing fields or cannot be parsed."""


def render_ranked(ranked: RankedList) -> list:
    return [{"doc_id": doc_id, "score": score} for doc_id, score in ranked.entries]


def render_merged(merged: MergedResult) -> list:
    return [{"doc_id": e.doc_id, "score": e.score, "contributors": e.contributors}
            for e in merged.entries]


def render_snapshot(session: Session) -> dict:
    with session._lock:
        histories = {
            collab: [{"query": e.query, "results": render_ranked(e.results)}
                     for e in entries]
            for collab, entries in session.history.items()
        }
        judgments = [{"collaborator_id": c, "doc_id": d, "relevant": rel}
                     for (c, d), rel in session.judgments.items()]
        suggestions = {c: session.suggestions(c) for c in session.collaborators}
        return {
            "session_id": session.session_id,
            "collaborators": list(session.collaborators),
            "histories": histories,
            "merged": render_merged(session.merged),
            "suggestions": suggestions,
            "judgments": judgments,
        }


def _error_response(code: str, message: str, status: int) -> JSONResponse:
    return JSONResponse({"code": code, "message": message}, status_code=status)


def _classify(exc: VircisError) -> tuple[str, int]:
    if isinstance(exc, SessionNotFoundError):
        return "not_found", 404
    if isinstance(exc, SessionConflictError):
        return "conflict", 409
    if isinstance(exc, (UnsupportedAudioError, AudioFormatError)):
        return "unsupported_media", 415
    return "bad_input", 400


def create_app(settings: ServiceSettings) -> FastAPI:
    app = FastAPI(title="vircis", docs_url=None, redoc_url=None)
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    registry = SessionRegistry(settings.filter_config)

    @app.exception_handler(VircisError)
    async def _vircis_error(_request: Request, exc: VircisError):
        code, status = _classify(exc)
        return _error_response(code, str(exc), status)

    @app.exception_handler(Exception)
    async def _internal_error(_request: Request, exc: Exception):
        return _error_response("internal", f"{type(exc).__name__}: {exc}", 500)

    async def _json_body(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise BadRequest("request body must be JSON") from None
        if not isinstance(body, dict):
            raise BadRequest("request body must be a JSON object")
        return body

    def _field(body: dict, name: str) -> str:
        value = body.get(name)
        if not isinstance(value, str) or not value:
            raise BadRequest(f"field {name!r} must be a non-empty string")
        return value

    @app.post("/sessions", status_code=201)
    async def create_session_route(request: Request):
        body = await _json_body(request)
        session = registry.create(_field(body, "session_id"))
        return render_snapshot(session)

    @app.post("/sessions/{session_id}/collaborators")
    async def join_route(session_id: str, request: Request):
        body = await _json_body(request)
        session = registry.get(session_id)
        session.join(_field(body, "collaborator_id"))
        return render_snapshot(session)

    @app.get("/sessions/{session_id}")
    async def snapshot_route(session_id: str):
        return render_snapshot(registry.get(session_id))

    @app.post("/sessions/{session_id}/queries")
    async def query_route(session_id: str, request: Request):
        session = registry.get(session_id)
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            collaborator = form.get("collaborator_id")
            if not isinstance(collaborator, str) or not collaborator:
                raise BadRequest("form field 'collaborator_id' is required")
            upload = form.get("audio")
            if upload is None or isinstance(upload, str):
                raise BadRequest("multipart queries need an 'audio' file field")
            clip = load_wav(io.BytesIO(await upload.read()))
            if settings.vocab is None or len(settings.vocab) == 0:
                raise ConfigurationError("no vocabulary models are loaded")
            transcript = transcribe_clip(
                clip, settings.vocab, settings.frame_spec, settings.mfcc_config,
                silence_threshold=settings.silence_threshold,
                min_silence_ms=settings.min_silence_ms)
        else:
            body = await _json_body(request)
            collaborator = _field(body, "collaborator_id")
            transcript = _field(body, "text")
        ranked = session.submit_query(collaborator, transcript, settings.index,
                                      settings.top_k)
        return {
            "transcript": transcript,
            "individual_results": render_ranked(ranked),
            "merged_results": render_merged(session.merged),
        }

    @app.post("/sessions/{session_id}/judgments")
    async def judgment_route(session_id: str, request: Request):
        body = await _json_body(request)
        session = registry.get(session_id)
        relevant = body.get("relevant")
        if not isinstance(relevant, bool):
            raise BadRequest("field 'relevant' must be a boolean")
        merged = session.judge(_field(body, "collaborator_id"),
                               _field(body, "doc_id"), relevant)
        return {"merged": render_merged(merged)}

    @app.get("/sessions/{session_id}/split")
    async def split_route(session_id: str):
        assignment = registry.get(session_id).split()
        return {"assignment": {c: list(docs)
                               for c, docs in assignment.assignment.items()}}

    return app


def serve(settings: ServiceSettings, host: str = "127.0.0.1", port: int = 8000) -> None:
    import uvicorn

    uvicorn.run(create_app(settings), host=host, port=port, log_level="warning")
