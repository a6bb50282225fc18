"""Term-frequency disambiguation stage.

An ambiguous span is resolved toward the candidate concept with the most
unambiguous evidence in the same document: the count of other spans whose
surfaces belong to that concept. Ties go to the lexicographically
smallest concept id, so candidate list order never changes the winner.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import replace
from typing import Iterable, Sequence

from .lexicon import AmbiguousEntry, fold_text
from .spans import AnnotationSpan


def disambiguate(
    spans: Sequence[AnnotationSpan],
    ambiguous: Iterable[AmbiguousEntry],
    text: str = "",
) -> list[AnnotationSpan]:
    amb_map = {e.surface: e.candidates for e in ambiguous}
    if not amb_map:
        return list(spans)

    # Evidence counts come only from spans whose surface is unambiguous;
    # provisional concepts on ambiguous spans are not evidence.
    evidence = Counter(
        s.concept for s in spans if fold_text(s.surface) not in amb_map
    )

    out = []
    for span in spans:
        candidates = amb_map.get(fold_text(span.surface))
        if candidates is None:
            out.append(span)
            continue
        tfs = {c: evidence.get(c, 0) for c in candidates}
        total = sum(tfs.values())
        best = max(tfs.values())
        winner = min(c for c, tf in tfs.items() if tf == best)
        score = tfs[winner] / total if total else 1.0 / len(candidates)
        out.append(replace(span, concept=winner, score=score))
    return out
