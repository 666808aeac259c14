"""The daemon's loopback HTTP surface for the capture client and researchers.

Bearer-token auth on every data endpoint keeps drive-by cross-origin posts
from arbitrary pages out of the archive; the CSV endpoint also accepts the
token as a query parameter so a browser download link can carry it. Archive
mutations serialize through the archive's single-writer lock, so concurrent
deliveries never interleave records.
"""
from __future__ import annotations

import hmac
import io
import json
import time

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from starlette.concurrency import run_in_threadpool

from . import __version__
from .archive import Archive
from .config import ServiceConfig
from .envelope import envelope_from_dict
from .errors import MissingKey, ParseError
from .export import ExportConfig, export_csv
from .ingest import ingest_envelope
from .patterns import PatternTable


def _token_ok(config: ServiceConfig, request: Request) -> bool:
    header = request.headers.get("authorization", "")
    presented = header[7:] if header.lower().startswith("bearer ") else ""
    if not presented:
        presented = request.query_params.get("token", "")
    return bool(config.auth_token) and hmac.compare_digest(presented, config.auth_token)


def create_app(archive: Archive, config: ServiceConfig, table: PatternTable) -> FastAPI:
    app = FastAPI(title="storytide daemon", version=__version__)

    def unauthorized() -> JSONResponse:
        return JSONResponse({"error": "unauthorized"}, status_code=401)

    @app.get("/api/v1/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/v1/envelopes")
    async def post_envelope(request: Request):
        if not _token_ok(config, request):
            return unauthorized()
        try:
            doc = json.loads(await request.body())
            env = envelope_from_dict(doc)
        except (json.JSONDecodeError, ValueError) as exc:
            return JSONResponse({"error": f"malformed envelope: {exc}"}, status_code=400)
        try:
            receipt = await run_in_threadpool(ingest_envelope, env, table, archive)
        except ParseError as exc:
            # Delivered but unparsed: the raw body is already quarantined.
            return JSONResponse(
                {"quarantined": True, "envelope_id": env.envelope_id, "error": str(exc)},
                status_code=422,
            )
        return receipt.to_dict()

    @app.get("/api/v1/stats")
    def get_stats(request: Request):
        if not _token_ok(config, request):
            return unauthorized()
        return archive.stats()

    @app.post("/api/v1/sessions")
    async def post_session(request: Request):
        if not _token_ok(config, request):
            return unauthorized()
        try:
            doc = json.loads(await request.body())
            label = doc["label"]
            if not isinstance(label, str) or not label:
                raise ValueError("label must be a non-empty string")
            started_at = doc.get("started_at")
            if started_at is not None and not isinstance(started_at, int):
                raise ValueError("started_at must be an integer")
        except (json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
            return JSONResponse({"error": f"malformed session request: {exc}"}, status_code=400)
        if started_at is None:
            started_at = int(time.time())
        session = archive.begin_session(label, started_at)
        return JSONResponse(session.to_dict(), status_code=201)

    @app.get("/api/v1/export.csv")
    def get_export(request: Request, pseudonymize: bool = False):
        if not _token_ok(config, request):
            return unauthorized()
        export_config = ExportConfig(
            pseudonymize=pseudonymize, pseudonym_key=config.pseudonym_key
        )
        buffer = io.StringIO()
        try:
            export_csv(archive, export_config, buffer)
        except MissingKey as exc:
            return JSONResponse({"error": str(exc)}, status_code=409)
        return Response(
            content=buffer.getvalue(),
            media_type="text/csv; charset=utf-8",
            headers={"Content-Disposition": 'attachment; filename="stories.csv"'},
        )

    return app
