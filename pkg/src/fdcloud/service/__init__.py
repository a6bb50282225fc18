"""HTTP+JSON API, CLI, authentication, and notification delivery."""

from .auth import Authenticator, Session, hash_password, write_credential_file
from .notify import (
    DeliveryRecord,
    LogSink,
    Notification,
    Notifier,
    WebhookSink,
)

__all__ = [
    "Authenticator",
    "DeliveryRecord",
    "LogSink",
    "Notification",
    "Notifier",
    "Session",
    "WebhookSink",
    "hash_password",
    "write_credential_file",
]
