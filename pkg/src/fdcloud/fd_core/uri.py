"""Absolute-URI validation used wherever tags and links accept URIs."""

from __future__ import annotations

import re
from urllib.parse import urlsplit

from ..errors import ValidationError

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*$")


def validate_absolute_uri(uri: str) -> str:
    """Return ``uri`` if it is a syntactically valid absolute URI.

    Requires a well-formed scheme plus a non-empty remainder and rejects
    whitespace and control characters outright.
    """
    if not isinstance(uri, str) or not uri:
        raise ValidationError("URI must be a non-empty string")
    if any(c.isspace() or ord(c) < 0x20 for c in uri):
        raise ValidationError(f"URI contains whitespace or control characters: {uri!r}")
    parts = urlsplit(uri)
    if not parts.scheme or not _SCHEME.match(parts.scheme):
        raise ValidationError(f"not an absolute URI: {uri!r}")
    if not (parts.netloc or parts.path or parts.query or parts.fragment):
        raise ValidationError(f"URI has no body after scheme: {uri!r}")
    return uri
