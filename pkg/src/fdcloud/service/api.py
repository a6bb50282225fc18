"""HTTP+JSON API over the store, tags, scheduler, and metrics.

Request bodies are parsed by hand rather than through framework models so
every failure funnels into the one error shape: {"code", "message"}.
"""

from __future__ import annotations

import base64
import binascii
import json
import time
from dataclasses import dataclass, field
from typing import Iterator

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from ..docstore import DocumentStore, Query
from ..errors import (
    AuthError,
    FdcError,
    ForbiddenError,
    InputError,
    NotFoundError,
    PayloadTooLargeError,
    ValidationError,
)
from ..fd_core import (
    FolksodrivenTag,
    FormalContext,
    link_external_resource,
    make_fd_tag,
    tag_to_dict,
)
from ..jobs import TERMINAL_STATES, Job, JobSpec, Scheduler
from .auth import Authenticator, Session
from .notify import Notifier

STATUS_BY_CODE = {
    "auth": 401,
    "forbidden": 403,
    "not-found": 404,
    "rejected": 409,
    "transition": 409,
    "too-large": 413,
    "io": 500,
}

ROUTE_TABLE = (
    ("POST", "/login", "LoginRequest"),
    ("POST", "/documents", "DocumentUpload"),
    ("GET", "/documents/{id}", "DocumentRecord"),
    ("GET", "/search", "SearchQuery"),
    ("POST", "/tags", "TagCreate"),
    ("POST", "/tags/{id}/external", "ExternalResourceLink"),
    ("POST", "/jobs", "JobSpecRequest"),
    ("GET", "/jobs/{id}", "JobStatus"),
    ("GET", "/jobs/{id}/events", "JobEventStream"),
    ("GET", "/metrics", "MetricsSnapshot"),
    ("GET", "/plugins", "PluginRecordList"),
    ("POST", "/plugins/{id}/reset", "PluginReset"),
    ("GET", "/routes", "RouteList"),
)


@dataclass
class ServiceState:
    """Everything the route handlers need, built once at startup."""

    store: DocumentStore
    scheduler: Scheduler
    auth: Authenticator
    notifier: Notifier
    upload_cap_bytes: int = 1_048_576
    stream_poll_s: float = 0.2
    stream_max_wait_s: float = 30.0
    tags: dict[str, FolksodrivenTag] = field(default_factory=dict)


async def _json_body(request: Request) -> dict:
    try:
        data = await request.json()
    except Exception as exc:
        raise InputError(f"request body must be a JSON object: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("request body must be a JSON object")
    return data


def _session(state: ServiceState, request: Request) -> Session:
    header = request.headers.get("authorization", "")
    token = header.removeprefix("Bearer ").strip() if header.startswith("Bearer ") else None
    return state.auth.check(token)


def _require_str(body: dict, key: str) -> str:
    value = body.get(key)
    if not isinstance(value, str) or not value:
        raise ValidationError(f"field {key!r} must be a non-empty string")
    return value


def _job_payload(state: ServiceState, job: Job) -> dict:
    return {
        "id": job.id,
        "state": job.state,
        "plugin_id": job.spec.plugin_id,
        "params": dict(job.spec.params),
        "input_refs": list(job.spec.input_refs),
        "user_id": job.spec.user_id,
        "tasks": [
            {
                "id": t.id,
                "node_id": t.node_id,
                "state": t.state,
                "inputs": list(t.input_slice),
            }
            for t in job.tasks
        ],
        "step_timings": dict(sorted(job.step_timings.items())),
        "output_links": list(job.output_links),
        "created_at": job.created_at,
        "updated_at": job.updated_at,
        "events_seen": len(state.scheduler.job_events(job.id)),
    }


def _own_job(state: ServiceState, session: Session, job_id: str) -> Job:
    job = state.scheduler.get_job(job_id)
    if job.spec.user_id != session.user_id and not session.is_admin:
        raise ForbiddenError(f"job {job_id} belongs to another user")
    return job


def create_api(state: ServiceState) -> FastAPI:
    app = FastAPI(title="fdcloud", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.service = state

    @app.exception_handler(FdcError)
    async def _fdc_error(request: Request, exc: FdcError):
        status = STATUS_BY_CODE.get(exc.code, 400)
        return JSONResponse(
            status_code=status, content={"code": exc.code, "message": str(exc)}
        )

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException):
        code = "not-found" if exc.status_code == 404 else "http"
        return JSONResponse(
            status_code=exc.status_code,
            content={"code": code, "message": str(exc.detail)},
        )

    @app.exception_handler(Exception)
    async def _unexpected(request: Request, exc: Exception):
        return JSONResponse(
            status_code=500,
            content={"code": "internal", "message": "internal error"},
        )

    # -- auth -----------------------------------------------------------------

    @app.post("/login")
    async def login(request: Request):
        body = await _json_body(request)
        session = state.auth.login(
            _require_str(body, "username"), _require_str(body, "password")
        )
        return {
            "token": session.token,
            "user_id": session.user_id,
            "role": session.role,
            "expires_at": session.expires_at,
        }

    # -- documents --------------------------------------------------------------

    @app.post("/documents", status_code=201)
    async def upload_document(request: Request):
        session = _session(state, request)
        body = await _json_body(request)
        if "content_b64" in body:
            try:
                data = base64.b64decode(body["content_b64"], validate=True)
            except (binascii.Error, TypeError) as exc:
                raise InputError(f"content_b64 is not valid base64: {exc}") from exc
        elif "text" in body:
            if not isinstance(body["text"], str):
                raise ValidationError("field 'text' must be a string")
            data = body["text"].encode("utf-8")
        else:
            raise ValidationError("upload needs 'content_b64' or 'text'")
        if len(data) > state.upload_cap_bytes:
            raise PayloadTooLargeError(
                f"payload of {len(data)} bytes exceeds the "
                f"{state.upload_cap_bytes}-byte cap"
            )
        metadata = {
            "uri": body.get("uri", ""),
            "title": body.get("title", ""),
            "author": body.get("author", session.user_id),
            "date": body.get("date", ""),
            "media_type": body.get("media_type", "text/plain"),
        }
        doc_id = state.store.ingest(data, metadata)
        return {"file_id": doc_id, "doc_id": doc_id}

    @app.get("/documents/{doc_id}")
    async def get_document(doc_id: str, request: Request):
        _session(state, request)
        record = state.store.get(doc_id)
        payload = record.to_dict()
        payload["content_b64"] = base64.b64encode(
            state.store.raw_bytes(doc_id)
        ).decode("ascii")
        return payload

    @app.get("/search")
    async def search(request: Request):
        _session(state, request)
        params = request.query_params
        terms = tuple(t for t in params.get("q", "").split() if t)
        date_from, date_to = params.get("date_from"), params.get("date_to")
        date_range = None
        if date_from is not None or date_to is not None:
            if date_from is None or date_to is None:
                raise ValidationError("date filter needs both date_from and date_to")
            date_range = (date_from, date_to)
        try:
            limit = int(params.get("limit", "10"))
        except ValueError:
            raise ValidationError("limit must be an integer")
        query = Query(
            terms=terms,
            author_filter=params.get("author"),
            date_range=date_range,
            limit=limit,
        )
        results = []
        for result_id, score in state.store.search(query):
            record = state.store.get(result_id)
            results.append(
                {
                    "doc_id": result_id,
                    "score": score,
                    "title": record.title,
                    "author": record.author,
                    "date": record.date,
                    "uri": record.uri,
                    "tag_ids": sorted(record.tag_ids),
                }
            )
        return {"results": results}

    # -- tags ---------------------------------------------------------------

    @app.post("/tags", status_code=201)
    async def create_tag(request: Request):
        _session(state, request)
        body = await _json_body(request)
        doc_id = _require_str(body, "doc_id")
        record = state.store.get(doc_id)
        if "objects" in body or "attributes" in body or "incidence" in body:
            ctx = FormalContext(
                objects=frozenset(body.get("objects", ())),
                attributes=frozenset(body.get("attributes", ())),
                incidence=frozenset(
                    (pair[0], pair[1]) for pair in body.get("incidence", ())
                ),
            )
        else:
            # default context: the document against the concepts found in it
            concepts = sorted({s.concept for s in record.spans}) or ["document"]
            ctx = FormalContext(
                objects=frozenset({record.uri}),
                attributes=frozenset(concepts),
                incidence=frozenset((record.uri, c) for c in concepts),
            )
        span = None
        if body.get("span") is not None:
            raw = body["span"]
            if not isinstance(raw, (list, tuple)) or len(raw) != 2:
                raise ValidationError("span must be a [start, end] pair")
            span = (int(raw[0]), int(raw[1]))
        tag = make_fd_tag(ctx, record.uri, now=time.time())
        state.tags[tag.id] = tag
        state.store.attach_user_tag(doc_id, tag.id, span)
        payload = tag_to_dict(tag)
        payload["doc_id"] = doc_id
        return payload

    @app.post("/tags/{tag_id}/external")
    async def add_external(tag_id: str, request: Request):
        _session(state, request)
        body = await _json_body(request)
        tag = state.tags.get(tag_id)
        if tag is None:
            raise NotFoundError(f"unknown tag {tag_id!r}")
        updated = link_external_resource(tag, _require_str(body, "uri"))
        state.tags[tag_id] = updated
        return tag_to_dict(updated)

    # -- jobs -----------------------------------------------------------------

    @app.post("/jobs", status_code=201)
    async def submit_job(request: Request):
        session = _session(state, request)
        body = await _json_body(request)
        params = body.get("params", {})
        if not isinstance(params, dict):
            raise ValidationError("params must be an object of strings")
        spec = JobSpec(
            plugin_id=_require_str(body, "plugin_id"),
            params={str(k): str(v) for k, v in params.items()},
            input_refs=tuple(body.get("input_refs", ())),
            output_names=tuple(body.get("output_names", ())),
            user_id=session.user_id,
        )
        job_id = state.scheduler.submit(spec)
        return {"job_id": job_id}

    @app.get("/jobs/{job_id}")
    async def get_job(job_id: str, request: Request):
        session = _session(state, request)
        return _job_payload(state, _own_job(state, session, job_id))

    @app.get("/jobs/{job_id}/events")
    async def job_events(job_id: str, request: Request):
        session = _session(state, request)
        _own_job(state, session, job_id)
        try:
            last_seen = int(request.query_params.get("last_seen", "0"))
        except ValueError:
            raise ValidationError("last_seen must be an integer")

        def frames() -> Iterator[str]:
            last = last_seen
            deadline = time.monotonic() + state.stream_max_wait_s
            while True:
                events = state.scheduler.wait_events(
                    job_id, last, state.stream_poll_s
                )
                for event in events:
                    last = event.seq
                    data = json.dumps(event.to_wire(), separators=(",", ":"))
                    yield f"id:{event.seq}\ndata:{data}\n\n"
                if events and events[-1].state in TERMINAL_STATES:
                    return
                if time.monotonic() >= deadline:
                    return

        return StreamingResponse(frames(), media_type="text/event-stream")

    # -- operations ------------------------------------------------------------

    @app.get("/metrics")
    async def metrics(request: Request):
        _session(state, request)
        params = request.query_params
        window = None
        if "from_ms" in params or "to_ms" in params:
            try:
                lo = float(params.get("from_ms", "0"))
                hi = float(params.get("to_ms", state.scheduler.clock.now_ms))
            except ValueError:
                raise ValidationError("from_ms and to_ms must be numbers")
            window = (lo, hi)
        snapshot = state.scheduler.metrics(window)
        if params.get("format") == "text":
            return PlainTextResponse(snapshot.to_text())
        return snapshot.to_dict()

    @app.get("/plugins")
    async def plugins(request: Request):
        _session(state, request)
        return {
            "plugins": [
                {
                    "id": r.id,
                    "status": r.status,
                    "consecutive_critical_failures": r.consecutive_critical_failures,
                    "threshold": r.threshold,
                    "accepts_user_jobs": r.accepts_user_jobs,
                }
                for r in state.scheduler.registry.all_records()
            ]
        }

    @app.post("/plugins/{plugin_id}/reset")
    async def reset_plugin(plugin_id: str, request: Request):
        session = _session(state, request)
        body = await _json_body(request) if int(request.headers.get("content-length") or 0) else {}
        force = bool(body.get("force", False))
        if force and not session.is_admin:
            raise ForbiddenError("force reset requires the admin role")
        record = state.scheduler.registry.reset(plugin_id, force=force)
        return {
            "id": record.id,
            "status": record.status,
            "consecutive_critical_failures": record.consecutive_critical_failures,
            "threshold": record.threshold,
        }

    @app.get("/routes")
    async def routes():
        return {
            "routes": [
                {"method": method, "path": path, "schema": schema}
                for method, path, schema in ROUTE_TABLE
            ]
        }

    return app
