"""Acronym resolution stage.

Looks for the definition pattern "Long Form (LF)": a parenthesized
all-capitals token whose letters equal, case-insensitively, the initials
of the words immediately before it. When the long form is covered by an
existing annotation, every later standalone occurrence of the acronym
(exact-case, token-bounded) gains a span carrying the long form's
concept. Existing spans are never removed or mutated.
"""

from __future__ import annotations

from .spans import AnnotationSpan, byte_offsets

ACRONYM_SCORE = 0.9


def _word_tokens(text: str) -> list[tuple[int, int]]:
    """Maximal alphanumeric runs as (start_char, end_char) pairs."""
    tokens = []
    start = None
    for i, ch in enumerate(text):
        if ch.isalnum():
            if start is None:
                start = i
        elif start is not None:
            tokens.append((start, i))
            start = None
    if start is not None:
        tokens.append((start, len(text)))
    return tokens


def resolve_acronyms(
    text: str, spans: list[AnnotationSpan], doc_id: str = ""
) -> list[AnnotationSpan]:
    if not text:
        return list(spans)

    tokens = _word_tokens(text)
    if not tokens:
        return list(spans)

    boff = None if text.isascii() else byte_offsets(text)

    def to_bytes(char_pos: int) -> int:
        return char_pos if boff is None else boff[char_pos]

    by_range = {(s.start, s.end): s for s in spans}

    # Definitions: (token index of the acronym, acronym, concept).
    definitions: list[tuple[int, str, str]] = []
    for j, (ts, te) in enumerate(tokens):
        word = text[ts:te]
        if len(word) < 2 or not (word.isalpha() and word.isupper()):
            continue
        if ts == 0 or text[ts - 1] != "(" or te >= len(text) or text[te] != ")":
            continue
        k = len(word)
        if j < k:
            continue
        preceding = tokens[j - k : j]
        initials = "".join(text[s] for s, _ in preceding)
        if initials.lower() != word.lower():
            continue
        long_range = (to_bytes(preceding[0][0]), to_bytes(preceding[-1][1]))
        covering = by_range.get(long_range)
        if covering is None:
            continue
        definitions.append((j, word, covering.concept))

    if not definitions:
        return list(spans)

    out = list(spans)
    existing = set(by_range)
    definition_sites = {j for j, _, _ in definitions}
    for j, (ts, te) in enumerate(tokens):
        if j in definition_sites:
            # a parenthesized definition is not a standalone occurrence
            continue
        word = text[ts:te]
        # Latest definition of this acronym before the occurrence wins.
        concept = None
        for def_j, acronym, c in definitions:
            if def_j < j and acronym == word:
                concept = c
        if concept is None:
            continue
        rng = (to_bytes(ts), to_bytes(te))
        if rng in existing:
            continue
        existing.add(rng)
        out.append(
            AnnotationSpan(
                doc_id=doc_id or (spans[0].doc_id if spans else ""),
                start=rng[0],
                end=rng[1],
                surface=word,
                concept=concept,
                method="acronym",
                score=ACRONYM_SCORE,
            )
        )
    out.sort(key=lambda s: (s.start, s.end))
    return out
