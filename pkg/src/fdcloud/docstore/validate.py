"""File validation: findings as (line number, message) pairs."""

from __future__ import annotations

import json

from ..annotate.rdf import check_ntriples_line
from ..errors import UsageError

FORMATS = ("utf8-text", "ntriples", "json")

Finding = tuple[int, str]


def validate_file(data: bytes, format: str) -> list[Finding]:
    """Check ``data`` against the named format; valid input -> no findings."""
    if format == "utf8-text":
        return _validate_utf8(data)
    if format == "ntriples":
        return _validate_ntriples(data)
    if format == "json":
        return _validate_json(data)
    raise UsageError(f"unknown format {format!r}; expected one of {FORMATS}")


def _validate_utf8(data: bytes) -> list[Finding]:
    try:
        data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data[: exc.start].count(b"\n") + 1
        return [(line, f"invalid UTF-8 at byte offset {exc.start}: {exc.reason}")]
    return []


def _validate_ntriples(data: bytes) -> list[Finding]:
    findings = _validate_utf8(data)
    if findings:
        return findings
    text = data.decode("utf-8")
    out: list[Finding] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        message = check_ntriples_line(line)
        if message is not None:
            out.append((lineno, message))
    return out


def _validate_json(data: bytes) -> list[Finding]:
    findings = _validate_utf8(data)
    if findings:
        return findings
    try:
        json.loads(data.decode("utf-8"))
    except json.JSONDecodeError as exc:
        return [(exc.lineno, exc.msg)]
    return []
