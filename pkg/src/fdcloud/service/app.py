"""Wires the modules into one running service."""

from __future__ import annotations

import json
import queue
import threading
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass, field, fields
from pathlib import Path

from fastapi import FastAPI

from ..docstore import DocumentStore
from ..errors import NotFoundError, UsageError
from ..jobs import (
    PluginRegistry,
    RealTimeDriver,
    Scheduler,
    SchedulerConfig,
    builtin_plugins,
    config_from_dict,
)
from .api import ServiceState, create_api
from .auth import Authenticator
from .notify import LogSink, Notification, Notifier, WebhookSink


@dataclass
class AppConfig:
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    credential_file: str | None = None
    token_ttl_s: float = 3600.0
    upload_cap_bytes: int = 1_048_576
    notifier_sink: str = "log"
    webhook_url: str = ""
    driver_tick_s: float = 0.005
    sim_speed: float = 1.0

    def __post_init__(self) -> None:
        if self.notifier_sink not in ("log", "webhook"):
            raise UsageError(f"unknown notifier sink {self.notifier_sink!r}")
        if self.notifier_sink == "webhook" and not self.webhook_url:
            raise UsageError("webhook sink needs webhook_url")


def load_app_config(path: str | Path) -> AppConfig:
    """Read {"scheduler": {...}, "service": {...}} from a JSON file."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    unknown = set(data) - {"scheduler", "service"}
    if unknown:
        raise UsageError(f"unknown config sections: {sorted(unknown)}")
    scheduler = config_from_dict(data.get("scheduler", {}))
    service = data.get("service", {})
    known = {f.name for f in fields(AppConfig)} - {"scheduler"}
    bad = set(service) - known
    if bad:
        raise UsageError(f"unknown service config keys: {sorted(bad)}")
    return AppConfig(scheduler=scheduler, **service)


class ServiceRuntime:
    """Owns the background threads: clock driver and notification worker."""

    def __init__(self, state: ServiceState, config: AppConfig):
        self.state = state
        self.config = config
        self.driver = RealTimeDriver(
            state.scheduler, tick_s=config.driver_tick_s, speed=config.sim_speed
        )
        self._queue: "queue.Queue[Notification | None]" = queue.Queue()
        self._worker: threading.Thread | None = None

    def enqueue(self, notification: Notification) -> None:
        self._queue.put(notification)

    def start(self) -> None:
        self.driver.start()
        if self._worker is None:
            self._worker = threading.Thread(target=self._drain, daemon=True)
            self._worker.start()

    def stop(self) -> None:
        self.driver.stop()
        if self._worker is not None:
            self._queue.put(None)
            self._worker.join()
            self._worker = None

    def flush(self, timeout_s: float = 2.0) -> None:
        deadline = time.monotonic() + timeout_s
        while not self._queue.empty() and time.monotonic() < deadline:
            time.sleep(0.005)

    def _drain(self) -> None:
        while True:
            item = self._queue.get()
            if item is None:
                return
            self.state.notifier.send(item)


def build_state(
    config: AppConfig, data_dir: str | Path, auth: Authenticator | None = None
) -> tuple[ServiceState, ServiceRuntime]:
    store = DocumentStore(data_dir)

    def fetch_text(ref: str) -> str:
        try:
            return store.get(ref).text
        except NotFoundError:
            return ref

    def fetch_tags(ref: str) -> list[str]:
        try:
            return sorted(store.get(ref).tag_ids)
        except NotFoundError:
            return []

    registry = PluginRegistry(config.scheduler.blacklist_threshold)
    for plugin_id, behavior in builtin_plugins(fetch_text, fetch_tags).items():
        registry.register(plugin_id, behavior)

    if config.notifier_sink == "webhook":
        sink = WebhookSink(config.webhook_url)
    else:
        sink = LogSink()
    notifier = Notifier(sink)

    if auth is None:
        if config.credential_file:
            auth = Authenticator.from_file(
                config.credential_file, ttl_s=config.token_ttl_s
            )
        else:
            auth = Authenticator({}, ttl_s=config.token_ttl_s)

    state = ServiceState(
        store=store,
        scheduler=Scheduler(config.scheduler, registry, store=store),
        auth=auth,
        notifier=notifier,
        upload_cap_bytes=config.upload_cap_bytes,
    )
    runtime = ServiceRuntime(state, config)

    def on_informed(plugin_id: str) -> None:
        runtime.enqueue(
            Notification(
                user_id="operators",
                kind="plugin-informed",
                payload={"plugin_id": plugin_id},
                created_at=time.time(),
            )
        )

    def on_terminal(job) -> None:
        if job.state == "Done":
            note = Notification(
                user_id=job.spec.user_id,
                kind="job-done",
                payload={"job_id": job.id, "output_links": list(job.output_links)},
                created_at=time.time(),
            )
        elif job.state == "Failed":
            note = Notification(
                user_id=job.spec.user_id,
                kind="job-failed",
                payload={"job_id": job.id},
                created_at=time.time(),
            )
        else:
            return
        runtime.enqueue(note)

    state.scheduler.on_informed = on_informed
    state.scheduler.on_terminal.append(on_terminal)
    return state, runtime


def create_app(
    config: AppConfig | None = None,
    data_dir: str | Path = "fdc-data",
    auth: Authenticator | None = None,
) -> FastAPI:
    """Build the full application; background threads follow the app lifespan."""
    config = config or AppConfig()
    state, runtime = build_state(config, data_dir, auth=auth)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        runtime.start()
        try:
            yield
        finally:
            runtime.stop()

    app = create_api(state)
    app.router.lifespan_context = lifespan
    app.state.runtime = runtime
    return app
