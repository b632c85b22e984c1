"""Thin HTTP session service: each session owns one ReplState; requests
within a session serialize, distinct sessions run concurrently.

Blocks returned over the wire carry exactly the text a local REPL would
print, so transcripts agree byte for byte.
"""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .errors import DiscoError
from .repl import ReplConfig, ReplState, render_error

MAX_INPUT_BYTES = 64 * 1024
MAX_LOAD_BYTES = 1024 * 1024


@dataclass
class ServerConfig:
    repl: ReplConfig = field(default_factory=ReplConfig)
    host: str = "127.0.0.1"
    port: int = 8000
    session_cap: int = 256
    idle_seconds: float = 30 * 60
    request_timeout: float = 5.0
    prelude_files: list[str] = field(default_factory=list)
    static_dir: str | None = None


class Session:
    def __init__(self, config: ReplConfig, prelude: list[tuple[str, str]]):
        self.id = secrets.token_urlsafe(32)  # 256 bits
        self.state = ReplState(config)
        self.lock = threading.Lock()
        self.last_activity = time.monotonic()
        for name, source in prelude:
            self.state.load_source(name, source)

    def touch(self):
        self.last_activity = time.monotonic()


class FileEntry(BaseModel):
    name: str
    contents: str


class InputBody(BaseModel):
    line: str


class LoadBody(BaseModel):
    files: list[FileEntry]


def create_app(config: ServerConfig | None = None) -> FastAPI:
    config = config or ServerConfig()
    app = FastAPI(title="disco-session-service")
    sessions: dict[str, Session] = {}
    store_lock = threading.Lock()
    prelude: list[tuple[str, str]] = []
    for path in config.prelude_files:
        prelude.append((path, Path(path).read_text(encoding="utf-8")))

    def sweep() -> None:
        now = time.monotonic()
        expired = [sid for sid, s in sessions.items()
                   if now - s.last_activity > config.idle_seconds]
        for sid in expired:
            del sessions[sid]

    def get_session(sid: str) -> Session | None:
        with store_lock:
            sweep()
            return sessions.get(sid)

    @app.post("/api/session")
    def create_session():
        with store_lock:
            sweep()
            if len(sessions) >= config.session_cap:
                return JSONResponse({"error": "session capacity reached"}, status_code=503)
            session = Session(config.repl, prelude)
            sessions[session.id] = session
        return {"sessionId": session.id}

    @app.post("/api/session/{sid}/input")
    def session_input(sid: str, body: InputBody):
        session = get_session(sid)
        if session is None:
            return JSONResponse({"error": "unknown or expired session"}, status_code=404)
        if len(body.line.encode("utf-8")) > MAX_INPUT_BYTES:
            return JSONResponse({"error": "input too large"}, status_code=413)
        with session.lock:
            session.touch()
            deadline = time.monotonic() + config.request_timeout
            blocks = session.state.exec_input(body.line, deadline=deadline)
        return {"blocks": [b.to_json() for b in blocks]}

    @app.post("/api/session/{sid}/load")
    def session_load(sid: str, body: LoadBody):
        session = get_session(sid)
        if session is None:
            return JSONResponse({"error": "unknown or expired session"}, status_code=404)
        total = sum(len(f.contents.encode("utf-8")) for f in body.files)
        if total > MAX_LOAD_BYTES:
            return JSONResponse({"error": "upload too large"}, status_code=413)
        blocks = []
        with session.lock:
            session.touch()
            deadline = time.monotonic() + config.request_timeout
            for f in body.files:
                try:
                    blocks.extend(session.state.load_source(f.name, f.contents, deadline=deadline))
                except DiscoError as e:
                    blocks.append(render_error(e))
        return {"blocks": [b.to_json() for b in blocks]}

    @app.get("/api/health")
    def health():
        return PlainTextResponse("ok")

    static_dir = config.static_dir
    if static_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        if candidate.is_dir():
            static_dir = str(candidate)
    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="playground")

    return app


def serve(config: ServerConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
