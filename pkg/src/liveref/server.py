"""HTTP + event-stream service over a live session.

Endpoints:
    GET  /api/analysis?file=...   latest AnalysisDocument (404 before first inspection)
    POST /api/apply               {file, candidate_id, name?} -> SnapshotRecord
    POST /api/edit                {file, changed_chars} -> {status}
    GET  /api/log                 the snapshot log, one JSON record per line
    GET  /ws                      server-sent event stream of analysis/apply events
Errors surface as {error, code} bodies; stale candidates map to HTTP 409.
"""

from __future__ import annotations

import json
import queue

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response, StreamingResponse

from .extraction import (
    IllegalFragmentError,
    NameCollisionError,
    RefactoringError,
    StaleCandidateError,
)
from .document import document_bytes
from .session import LiveSession


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse({"error": message, "code": code}, status_code=status)


def create_app(session: LiveSession) -> FastAPI:
    app = FastAPI(title="liveref", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.session = session

    @app.get("/api/analysis")
    def get_analysis(file: str):
        doc = session.document_dict(file)
        if doc is None:
            return _error(404, "no-analysis", f"no analysis published for {file!r}")
        return Response(content=document_bytes(doc), media_type="application/json")

    @app.post("/api/apply")
    async def post_apply(request: Request):
        body = await request.json()
        file = body.get("file")
        candidate_id = body.get("candidate_id")
        name = body.get("name")
        if not file or not candidate_id:
            return _error(400, "bad-request", "file and candidate_id are required")
        try:
            record = session.apply_refactoring(file, candidate_id, name=name)
        except StaleCandidateError as exc:
            return _error(409, "stale-candidate", str(exc))
        except NameCollisionError as exc:
            return _error(400, "name-collision", str(exc))
        except IllegalFragmentError as exc:
            return _error(400, "illegal-fragment", str(exc))
        except RefactoringError as exc:
            return _error(500, "rewrite-error", str(exc))
        except OSError as exc:
            return _error(500, "io-error", str(exc))
        return JSONResponse(record.to_dict())

    @app.post("/api/edit")
    async def post_edit(request: Request):
        body = await request.json()
        file = body.get("file")
        changed = body.get("changed_chars")
        if not file or changed is None:
            return _error(400, "bad-request", "file and changed_chars are required")
        try:
            status = session.on_edit(file, int(changed))
        except OSError as exc:
            return _error(404, "watch-error", str(exc))
        return JSONResponse({"status": status})

    @app.get("/api/log")
    def get_log():
        def lines():
            if session.log_path.exists():
                with open(session.log_path, "r", encoding="utf-8") as fh:
                    for line in fh:
                        yield line

        return StreamingResponse(lines(), media_type="application/x-ndjson")

    @app.get("/ws")
    def event_stream():
        q = session.subscribe()

        def events():
            try:
                yield ": connected\n\n"
                while True:
                    try:
                        event = q.get(timeout=15.0)
                    except queue.Empty:
                        yield ": keepalive\n\n"
                        continue
                    yield f"data: {json.dumps(event, sort_keys=True)}\n\n"
            finally:
                session.unsubscribe(q)

        return StreamingResponse(
            events(),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
        )

    return app
