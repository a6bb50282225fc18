"""In-memory inverted index with conjunctive tf-idf search."""

from __future__ import annotations

import math
import re
from bisect import insort
from collections import Counter
from dataclasses import dataclass, field

from ..errors import NotFoundError, ValidationError

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercased maximal alphanumeric runs."""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class Query:
    terms: tuple[str, ...] = ()
    author_filter: str | None = None
    date_range: tuple[str, str] | None = None
    limit: int = 10
    within: frozenset[str] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        if not (self.terms or self.author_filter is not None or self.date_range):
            raise ValidationError(
                "query needs terms, an author filter, or a date range"
            )
        if self.limit < 1:
            raise ValidationError(f"limit must be positive, got {self.limit}")
        if self.date_range is not None and self.date_range[0] > self.date_range[1]:
            raise ValidationError("date range is inverted")


class InvertedIndex:
    """term -> sorted (doc id, tf) postings, plus per-document stats.

    Re-indexing a document replaces its old postings entirely, so the
    incrementally maintained structure always equals a from-scratch
    rebuild over the current texts.
    """

    def __init__(self) -> None:
        self.postings: dict[str, list[tuple[str, int]]] = {}
        self.doc_token_counts: dict[str, int] = {}
        self._doc_terms: dict[str, set[str]] = {}

    @property
    def doc_count(self) -> int:
        return len(self.doc_token_counts)

    def index_document(self, doc_id: str, text: str) -> None:
        if doc_id in self._doc_terms:
            self.remove_document(doc_id)
        tokens = tokenize(text)
        counts = Counter(tokens)
        for term, tf in counts.items():
            insort(self.postings.setdefault(term, []), (doc_id, tf))
        self.doc_token_counts[doc_id] = len(tokens)
        self._doc_terms[doc_id] = set(counts)

    def remove_document(self, doc_id: str) -> None:
        if doc_id not in self._doc_terms:
            raise NotFoundError(f"document {doc_id!r} is not indexed")
        for term in self._doc_terms.pop(doc_id):
            plist = [p for p in self.postings[term] if p[0] != doc_id]
            if plist:
                self.postings[term] = plist
            else:
                del self.postings[term]
        del self.doc_token_counts[doc_id]

    def term_frequency(self, term: str, doc_id: str) -> int:
        for d, tf in self.postings.get(term, []):
            if d == doc_id:
                return tf
        return 0

    def candidates(self, terms: tuple[str, ...]) -> set[str]:
        """Documents containing ALL of the given terms (conjunctive)."""
        if not terms:
            return set(self.doc_token_counts)
        sets = []
        for term in terms:
            plist = self.postings.get(term)
            if not plist:
                return set()
            sets.append({d for d, _ in plist})
        return set.intersection(*sets)

    def score(self, terms: tuple[str, ...], doc_id: str) -> float:
        """Sum of tf(term, doc) * ln(1 + N / df(term)) over the terms."""
        n = self.doc_count
        total = 0.0
        for term in terms:
            plist = self.postings.get(term, [])
            df = len(plist)
            if df == 0:
                continue
            total += self.term_frequency(term, doc_id) * math.log(1.0 + n / df)
        return total
