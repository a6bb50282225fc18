"""Content-addressed document store with a crash-safe journal.

Layout on disk: ``blobs/<hex sha256>`` for raw bytes, plus an append-only
``journal.ndjson`` holding one JSON document record per line (the latest
line for an id wins). The inverted index is rebuilt from the journal on
startup. Mutations are serialized through one lock: single writer,
consistent snapshots for readers.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..annotate.spans import AnnotationSpan, byte_offsets
from ..errors import DomainError, NotFoundError, StorageError, ValidationError
from ..fd_core import doc_similarity
from .index import InvertedIndex, Query

ELEMENT_KINDS = ("image", "table", "word", "phrase")

_SENTENCE = re.compile(r"[^.!?]+(?:[.!?]+|$)")

METADATA_FIELDS = ("uri", "title", "author", "date", "media_type")


@dataclass(frozen=True)
class DocumentRecord:
    id: str
    uri: str
    title: str
    author: str
    date: str
    media_type: str
    raw_ref: str
    text: str
    elements: tuple[tuple[str, tuple[int, int]], ...] = ()
    tag_ids: frozenset[str] = frozenset()
    spans: tuple[AnnotationSpan, ...] = ()

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "uri": self.uri,
            "title": self.title,
            "author": self.author,
            "date": self.date,
            "media_type": self.media_type,
            "raw_ref": self.raw_ref,
            "text": self.text,
            "elements": [[kind, [a, b]] for kind, (a, b) in self.elements],
            "tag_ids": sorted(self.tag_ids),
            "spans": [s.to_wire() for s in self.spans],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DocumentRecord":
        return cls(
            id=data["id"],
            uri=data["uri"],
            title=data["title"],
            author=data["author"],
            date=str(data["date"]),
            media_type=data["media_type"],
            raw_ref=data["raw_ref"],
            text=data["text"],
            elements=tuple(
                (kind, (int(a), int(b))) for kind, (a, b) in data.get("elements", [])
            ),
            tag_ids=frozenset(data.get("tag_ids", [])),
            spans=tuple(AnnotationSpan.from_wire(s) for s in data.get("spans", [])),
        )


def _phrase_elements(text: str) -> tuple[tuple[str, tuple[int, int]], ...]:
    """Sentence-ish segments of a text document, as byte ranges."""
    if not text:
        return ()
    boff = None if text.isascii() else byte_offsets(text)
    out = []
    for m in _SENTENCE.finditer(text):
        seg = m.group().strip()
        if not seg:
            continue
        start = m.start() + (len(m.group()) - len(m.group().lstrip()))
        end = start + len(seg)
        if boff is None:
            out.append(("phrase", (start, end)))
        else:
            out.append(("phrase", (boff[start], boff[end])))
    return tuple(out)


class DocumentStore:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.blob_dir = self.data_dir / "blobs"
        self.journal_path = self.data_dir / "journal.ndjson"
        self.blob_dir.mkdir(parents=True, exist_ok=True)
        self._records: dict[str, DocumentRecord] = {}
        self.index = InvertedIndex()
        self._lock = threading.RLock()
        self._load()

    def _load(self) -> None:
        if not self.journal_path.exists():
            return
        for line in self.journal_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = DocumentRecord.from_dict(json.loads(line))
            self._records[record.id] = record
        for record in self._records.values():
            self.index.index_document(record.id, record.text)

    def _journal(self, record: DocumentRecord) -> None:
        try:
            with self.journal_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.to_dict(), separators=(",", ":")) + "\n")
        except OSError as exc:
            raise StorageError(f"cannot append to journal: {exc}") from exc

    # -- ingestion ---------------------------------------------------------

    def ingest(self, data: bytes, metadata: dict) -> str:
        """Store bytes under their content hash and register the record.

        Idempotent: identical bytes land on the same id and leave the
        store unchanged.
        """
        if not data:
            raise ValidationError("refusing to ingest a zero-length document")
        missing = [f for f in METADATA_FIELDS if f not in metadata]
        if missing:
            raise ValidationError(f"metadata is missing fields: {missing}")
        doc_id = hashlib.sha256(data).hexdigest()
        with self._lock:
            if doc_id in self._records:
                return doc_id
            blob_path = self.blob_dir / doc_id
            if not blob_path.exists():
                try:
                    blob_path.write_bytes(data)
                except OSError as exc:
                    raise StorageError(f"cannot write blob: {exc}") from exc
            media_type = metadata["media_type"]
            if media_type.startswith("text/"):
                text = data.decode("utf-8", errors="replace")
                elements = _phrase_elements(text)
            else:
                text = ""
                kind = "image" if media_type.startswith("image/") else "table"
                elements = ((kind, (0, 0)),)
            record = DocumentRecord(
                id=doc_id,
                uri=metadata["uri"] or f"urn:fdc:doc:{doc_id}",
                title=metadata["title"],
                author=metadata["author"],
                date=str(metadata["date"]),
                media_type=media_type,
                raw_ref=f"blobs/{doc_id}",
                text=text,
                elements=elements,
            )
            self._records[doc_id] = record
            self._journal(record)
            self.index.index_document(doc_id, text)
            return doc_id

    def get(self, doc_id: str) -> DocumentRecord:
        with self._lock:
            record = self._records.get(doc_id)
            if record is None:
                raise NotFoundError(f"unknown document {doc_id!r}")
            return record

    def raw_bytes(self, doc_id: str) -> bytes:
        record = self.get(doc_id)
        return (self.data_dir / record.raw_ref).read_bytes()

    def all_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._records)

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._records

    # -- indexing and search -----------------------------------------------

    def index_document(self, doc_id: str) -> None:
        """(Re)index a registered document from its current text."""
        with self._lock:
            record = self.get(doc_id)
            self.index.index_document(record.id, record.text)

    def search(self, query: Query) -> list[tuple[str, float]]:
        """Conjunctive term match + author/date filters, ranked by tf-idf."""
        with self._lock:
            terms = tuple(t.lower() for t in query.terms)
            docs = self.index.candidates(terms)
            results = []
            for doc_id in docs:
                record = self._records[doc_id]
                if query.author_filter is not None and record.author != query.author_filter:
                    continue
                if query.date_range is not None and not (
                    query.date_range[0] <= record.date <= query.date_range[1]
                ):
                    continue
                if query.within is not None and doc_id not in query.within:
                    continue
                results.append((doc_id, self.index.score(terms, doc_id)))
            results.sort(key=lambda r: (-r[1], r[0]))
            return results[: query.limit]

    # -- tags and relatedness ----------------------------------------------

    def attach_user_tag(
        self, doc_id: str, tag_id: str, span: tuple[int, int] | None = None
    ) -> DocumentRecord:
        """Attach a tag, optionally anchored to a byte span of the text.

        Idempotent per (document, tag, span) triple.
        """
        with self._lock:
            record = self.get(doc_id)
            new_span = None
            if span is not None:
                start, end = span
                raw = record.text.encode("utf-8")
                if not (0 <= start < end <= len(raw)):
                    raise ValidationError(
                        f"span [{start}, {end}) outside text bounds (0, {len(raw)})"
                    )
                try:
                    surface = raw[start:end].decode("utf-8")
                except UnicodeDecodeError as exc:
                    raise ValidationError(
                        f"span [{start}, {end}) splits a UTF-8 sequence"
                    ) from exc
                new_span = AnnotationSpan(
                    doc_id=doc_id,
                    start=start,
                    end=end,
                    surface=surface,
                    concept=tag_id,
                    method="user",
                    score=1.0,
                )
            changed = False
            tag_ids = record.tag_ids
            if tag_id not in tag_ids:
                tag_ids = tag_ids | {tag_id}
                changed = True
            spans = record.spans
            if new_span is not None and new_span not in spans:
                spans = spans + (new_span,)
                changed = True
            if not changed:
                return record
            record = replace(record, tag_ids=tag_ids, spans=spans)
            self._records[doc_id] = record
            self._journal(record)
            return record

    def set_spans(self, doc_id: str, spans: tuple[AnnotationSpan, ...]) -> DocumentRecord:
        """Replace machine annotations (used by the annotation pipeline)."""
        with self._lock:
            record = self.get(doc_id)
            user_spans = tuple(s for s in record.spans if s.method == "user")
            record = replace(record, spans=user_spans + tuple(spans))
            self._records[doc_id] = record
            self._journal(record)
            return record

    def add_tags(self, doc_id: str, tag_ids: set[str]) -> DocumentRecord:
        with self._lock:
            record = self.get(doc_id)
            if tag_ids <= record.tag_ids:
                return record
            record = replace(record, tag_ids=record.tag_ids | tag_ids)
            self._records[doc_id] = record
            self._journal(record)
            return record

    def related_documents(self, doc_id: str, k: int) -> list[tuple[str, float]]:
        """Top-k other documents by tag-set similarity."""
        if k < 1:
            raise DomainError(f"k must be >= 1, got {k}")
        with self._lock:
            record = self.get(doc_id)
            scored = [
                (other_id, doc_similarity(record.tag_ids, other.tag_ids))
                for other_id, other in self._records.items()
                if other_id != doc_id
            ]
            scored.sort(key=lambda r: (-r[1], r[0]))
            return scored[:k]
