"""Tag clouds and tag-set document similarity."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from ..errors import ValidationError


@dataclass(frozen=True)
class TagCloud:
    """Weighted tag list, heaviest first.

    Weights are relative to the most frequent tag, so clouds built from
    corpora of different sizes are comparable.
    """

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        prev = 1.0
        for tag_id, weight in self.entries:
            if tag_id in seen:
                raise ValidationError(f"duplicate tag id in cloud: {tag_id!r}")
            seen.add(tag_id)
            if not 0.0 < weight <= 1.0:
                raise ValidationError(f"cloud weight out of (0,1]: {weight}")
            if weight > prev:
                raise ValidationError("cloud weights must be non-increasing")
            prev = weight
        if self.entries and self.entries[0][1] != 1.0:
            raise ValidationError("max cloud weight must be 1.0")


def build_tag_cloud(occurrences: Iterable[str]) -> TagCloud:
    """Weight each tag by count / max count.

    Entries are sorted by weight descending, ties broken by tag id
    ascending, so the result is deterministic for any input permutation.
    """
    counts = Counter(occurrences)
    if not counts:
        return TagCloud(entries=())
    top = max(counts.values())
    entries = sorted(
        ((tag_id, n / top) for tag_id, n in counts.items()),
        key=lambda e: (-e[1], e[0]),
    )
    return TagCloud(entries=tuple(entries))


def doc_similarity(tags_a: Iterable[str], tags_b: Iterable[str]) -> float:
    """Jaccard similarity of two tag-id sets.

    Two untagged documents are indistinguishable, so both-empty maps to 1.
    """
    a, b = set(tags_a), set(tags_b)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)
