"""Password login against a salted-hash credential file; bearer-token sessions.

Credential file format, one user per line:

    username:salt_hex:sha256(salt || password)_hex[:role]

Role defaults to "user"; "admin" unlocks force-reset and foreign-job access.
Lookups never reveal whether a username exists: unknown users burn the same
hash comparison as wrong passwords.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from ..errors import AuthError, UsageError

ROLES = ("user", "admin")

# compared against when the username is unknown, to keep timing flat
_DUMMY_SALT = bytes(16)
_DUMMY_DIGEST = hashlib.sha256(_DUMMY_SALT + b"\x00").hexdigest()


def hash_password(password: str, salt: bytes) -> str:
    return hashlib.sha256(salt + password.encode("utf-8")).hexdigest()


def write_credential_file(
    path: str | Path, users: dict[str, tuple[str, str]]
) -> None:
    """users maps username -> (password, role). Overwrites the file."""
    lines = []
    for username, (password, role) in sorted(users.items()):
        if ":" in username:
            raise UsageError(f"username may not contain ':': {username!r}")
        if role not in ROLES:
            raise UsageError(f"unknown role {role!r} for {username!r}")
        salt = secrets.token_bytes(16)
        lines.append(f"{username}:{salt.hex()}:{hash_password(password, salt)}:{role}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class Session:
    user_id: str
    token: str
    expires_at: float
    role: str = "user"

    @property
    def is_admin(self) -> bool:
        return self.role == "admin"


class Authenticator:
    def __init__(
        self,
        credentials: dict[str, tuple[bytes, str, str]],
        ttl_s: float = 3600.0,
        clock: Callable[[], float] = time.time,
    ):
        # username -> (salt, digest hex, role)
        self._credentials = dict(credentials)
        self.ttl_s = ttl_s
        self._clock = clock
        self._sessions: dict[str, Session] = {}

    @classmethod
    def from_file(
        cls, path: str | Path, ttl_s: float = 3600.0, clock=time.time
    ) -> "Authenticator":
        credentials: dict[str, tuple[bytes, str, str]] = {}
        for lineno, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), start=1
        ):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(":")
            if len(parts) not in (3, 4):
                raise UsageError(f"credential file line {lineno} is malformed")
            username, salt_hex, digest = parts[:3]
            role = parts[3] if len(parts) == 4 else "user"
            if role not in ROLES:
                raise UsageError(f"credential file line {lineno}: bad role {role!r}")
            credentials[username] = (bytes.fromhex(salt_hex), digest, role)
        return cls(credentials, ttl_s=ttl_s, clock=clock)

    def add_user(self, username: str, password: str, role: str = "user") -> None:
        salt = secrets.token_bytes(16)
        self._credentials[username] = (salt, hash_password(password, salt), role)

    def login(self, username: str, password: str) -> Session:
        """Issue a fresh session token; bad credentials all fail alike."""
        entry = self._credentials.get(username)
        salt, expected, role = entry if entry else (_DUMMY_SALT, _DUMMY_DIGEST, "user")
        candidate = hash_password(password, salt)
        if not hmac.compare_digest(candidate, expected) or entry is None:
            raise AuthError("invalid credentials")
        session = Session(
            user_id=username,
            token=secrets.token_hex(16),
            expires_at=self._clock() + self.ttl_s,
            role=role,
        )
        self._sessions[session.token] = session
        return session

    def check(self, token: str | None) -> Session:
        """Resolve a bearer token, rejecting missing, unknown, and expired ones."""
        if not token:
            raise AuthError("missing bearer token")
        session = self._sessions.get(token)
        if session is None:
            raise AuthError("unknown or revoked token")
        if self._clock() >= session.expires_at:
            self._sessions.pop(token, None)
            raise AuthError("token expired")
        return session

    def revoke(self, token: str) -> None:
        self._sessions.pop(token, None)
