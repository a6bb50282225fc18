"""Annotation spans: located terminology matches inside a document."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ValidationError

METHODS = ("automaton", "acronym", "user")


@dataclass(frozen=True)
class AnnotationSpan:
    """A match at byte range [start, end) of a document's UTF-8 text.

    ``surface`` is exactly the text slice the offsets point at; ``method``
    records provenance (automaton scan, acronym resolution, or a user
    edit) and ``score`` is the stage's confidence in [0, 1].
    """

    doc_id: str
    start: int
    end: int
    surface: str
    concept: str
    method: str
    score: float

    def __post_init__(self) -> None:
        if not 0 <= self.start < self.end:
            raise ValidationError(f"bad span range [{self.start}, {self.end})")
        if self.method not in METHODS:
            raise ValidationError(f"unknown span method {self.method!r}")
        if not 0.0 <= self.score <= 1.0:
            raise ValidationError(f"span score out of [0,1]: {self.score}")

    def to_wire(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "start": self.start,
            "end": self.end,
            "surface": self.surface,
            "concept": self.concept,
            "method": self.method,
            "score": self.score,
        }

    @classmethod
    def from_wire(cls, data: dict) -> "AnnotationSpan":
        return cls(
            doc_id=data.get("doc_id", ""),
            start=int(data["start"]),
            end=int(data["end"]),
            surface=data["surface"],
            concept=data["concept"],
            method=data["method"],
            score=float(data["score"]),
        )


def byte_offsets(text: str) -> list[int]:
    """Prefix table mapping char index -> UTF-8 byte offset (length n+1)."""
    offsets = [0] * (len(text) + 1)
    pos = 0
    for i, ch in enumerate(text):
        offsets[i] = pos
        cp = ord(ch)
        if cp < 0x80:
            pos += 1
        elif cp < 0x800:
            pos += 2
        elif cp < 0x10000:
            pos += 3
        else:
            pos += 4
    offsets[len(text)] = pos
    return offsets
