"""Notification delivery: log and webhook sinks with retry and dead-letter."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable

from ..errors import ValidationError

KINDS = ("job-done", "job-failed", "plugin-informed")


@dataclass(frozen=True)
class Notification:
    user_id: str
    kind: str
    payload: dict = field(default_factory=dict)
    created_at: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValidationError(f"unknown notification kind {self.kind!r}")
        if self.kind == "job-done" and not self.payload.get("output_links"):
            raise ValidationError("job-done notifications must carry output links")

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "kind": self.kind,
            "payload": self.payload,
            "created_at": self.created_at,
        }


@dataclass
class DeliveryRecord:
    notification: Notification
    sink: str
    delivered_at: float
    attempts: int
    ok: bool


class LogSink:
    """Keeps notifications in memory; the default sink."""

    name = "log"

    def __init__(self):
        self.entries: list[Notification] = []

    def deliver(self, notification: Notification) -> None:
        self.entries.append(notification)


class WebhookSink:
    """POSTs the notification JSON to a fixed URL."""

    name = "webhook"

    def __init__(self, url: str, timeout_s: float = 5.0, post=None):
        import httpx

        self.url = url
        self.timeout_s = timeout_s
        self._post = post or httpx.post

    def deliver(self, notification: Notification) -> None:
        response = self._post(
            self.url,
            content=json.dumps(notification.to_dict()),
            headers={"content-type": "application/json"},
            timeout=self.timeout_s,
        )
        status = getattr(response, "status_code", 0)
        if not 200 <= status < 300:
            raise RuntimeError(f"webhook answered {status}")


class Notifier:
    """Retrying wrapper around one sink; failures land in a dead-letter list.

    send() never raises: delivery problems must not take the scheduler down.
    """

    def __init__(
        self,
        sink,
        max_attempts: int = 3,
        backoff_s: float = 0.05,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.time,
    ):
        self.sink = sink
        self.max_attempts = max_attempts
        self.backoff_s = backoff_s
        self._sleep = sleep
        self._clock = clock
        self.deliveries: list[DeliveryRecord] = []
        self.dead_letters: list[DeliveryRecord] = []

    def send(self, notification: Notification) -> DeliveryRecord:
        attempts = 0
        while True:
            attempts += 1
            try:
                self.sink.deliver(notification)
            except Exception:
                if attempts >= self.max_attempts:
                    record = DeliveryRecord(
                        notification, self.sink.name, self._clock(), attempts, False
                    )
                    self.dead_letters.append(record)
                    return record
                self._sleep(self.backoff_s * (2 ** (attempts - 1)))
            else:
                record = DeliveryRecord(
                    notification, self.sink.name, self._clock(), attempts, True
                )
                self.deliveries.append(record)
                return record
