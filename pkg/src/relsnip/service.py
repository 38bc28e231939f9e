"""HTTP/WebSocket service exposing the session engine.

Endpoints:

* ``POST /repositories``                 ingest documents, returns the id
* ``POST /sessions``                     open a session on a repository
* ``POST /sessions/{id}/exchanges``      append a turn, returns the result
* ``GET  /sessions/{id}/results/latest`` most recent window result
* ``POST /sessions/{id}/feedback``       thumbs up/down with optional note
* ``GET  /sessions/{id}/export``         ?format=json|csv
* ``WS   /sessions/{id}/stream``         pushes every new window result;
  accepts ``{"type": "config", ...}`` and ``{"type": "feedback", ...}``
  messages from the client.
"""

from __future__ import annotations

import asyncio
import contextlib
import queue

from fastapi import FastAPI, HTTPException, Query, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from relsnip.extraction import ExtractionConfig
from relsnip.session import Engine, export_session, window_result_dict


class DocumentIn(BaseModel):
    title: str = "document"
    text: str


class RepositoryIn(BaseModel):
    documents: list[DocumentIn] = Field(default_factory=list)
    paths: list[str] = Field(default_factory=list)


class ConfigIn(BaseModel):
    z: int = 5
    m: int = 5
    snippet_len: int = 3
    mode: str = "automatic"


class SessionIn(BaseModel):
    repository_id: str
    config: ConfigIn | None = None


class ExchangeIn(BaseModel):
    speaker: str
    text: str


class FeedbackIn(BaseModel):
    window: int
    rating: str
    note: str | None = None
    idempotency_key: str | None = None


def create_app(engine: Engine | None = None) -> FastAPI:
    app = FastAPI(title="relsnip", version="0.1.0")
    app.state.engine = engine or Engine()

    def _engine() -> Engine:
        return app.state.engine

    def _session(session_id: str):
        try:
            return _engine().get_session(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")

    @app.post("/repositories")
    def create_repository(body: RepositoryIn):
        try:
            repo_id = _engine().ingest_repository(
                paths=body.paths or None,
                documents=[(d.title, d.text) for d in body.documents] or None)
        except (ValueError, OSError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"repository_id": repo_id}

    @app.post("/sessions")
    def create_session(body: SessionIn):
        config = ExtractionConfig(**body.config.model_dump()) if body.config else None
        try:
            session = _engine().create_session(body.repository_id, config)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"session_id": session.id, "repository_id": session.repository_id}

    @app.post("/sessions/{session_id}/exchanges")
    def append_exchange(session_id: str, body: ExchangeIn):
        session = _session(session_id)
        try:
            result = _engine().append_exchange(session, body.speaker, body.text)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return window_result_dict(result)

    @app.get("/sessions/{session_id}/results/latest")
    def latest_result(session_id: str):
        session = _session(session_id)
        result = session.latest()
        if result is None:
            raise HTTPException(status_code=404, detail="no results yet")
        return window_result_dict(result)

    @app.post("/sessions/{session_id}/feedback")
    def feedback(session_id: str, body: FeedbackIn):
        session = _session(session_id)
        try:
            fb = _engine().record_feedback(session, body.window, body.rating,
                                           note=body.note, key=body.idempotency_key)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"window": fb.window, "rating": fb.rating, "note": fb.note,
                "count": len(session.feedback)}

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str, format: str = Query("json")):
        session = _session(session_id)
        try:
            payload = export_session(session, format)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        media = "application/json" if format == "json" else "text/csv"
        return PlainTextResponse(payload, media_type=media)

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str):
        engine = _engine()
        try:
            session = engine.get_session(session_id)
        except KeyError:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        outbox: queue.Queue = queue.Queue()

        def push(result):
            outbox.put(window_result_dict(result))

        session.listeners.append(push)
        loop = asyncio.get_running_loop()

        async def sender():
            while True:
                item = await loop.run_in_executor(None, outbox.get)
                if item is None:
                    return
                await websocket.send_json(item)

        send_task = asyncio.create_task(sender())
        try:
            while True:
                message = await websocket.receive_json()
                kind = message.get("type")
                if kind == "config":
                    if "mode" in message:
                        session.config.mode = message["mode"]
                    if "auto_snippets" in message:
                        session.config.mode = ("automatic" if message["auto_snippets"]
                                               else "manual")
                    await websocket.send_json({"type": "config_ack",
                                               "mode": session.config.mode})
                elif kind == "feedback":
                    fb = engine.record_feedback(
                        session, message["window"], message["rating"],
                        note=message.get("note"), key=message.get("idempotency_key"))
                    await websocket.send_json({"type": "feedback_ack",
                                               "window": fb.window,
                                               "count": len(session.feedback)})
                else:
                    await websocket.send_json({"type": "error",
                                               "detail": f"unknown message type {kind!r}"})
        except WebSocketDisconnect:
            pass
        finally:
            with contextlib.suppress(ValueError):
                session.listeners.remove(push)
            outbox.put(None)
            send_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await send_task

    return app
