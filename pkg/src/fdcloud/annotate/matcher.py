"""Deterministic terminology matcher.

``compile_matcher`` turns a lexicon into a failure-function automaton
(the classic multi-pattern construction: goto trie, BFS failure links,
output chains). ``scan`` runs it over a text and keeps the
leftmost-longest, token-bounded, case-insensitive matches.

The inner scan loop is the package's hot kernel. A compiled extension is
used when available; the pure-Python twin is selected as fallback at
import time, or forced with FDC_PURE_PYTHON=1. Both kernels share the
compiled transition tables and must agree symbol for symbol.
"""

from __future__ import annotations

import os
from array import array
from collections import deque
from dataclasses import dataclass, field

from ..errors import CompileError, InputError
from .lexicon import Lexicon, fold_text
from .spans import AnnotationSpan, byte_offsets

from . import _scan_py

if os.environ.get("FDC_PURE_PYTHON"):
    _kernel = _scan_py
else:
    try:
        from . import _scan_cy as _kernel  # type: ignore[no-redef]
    except ImportError:
        _kernel = _scan_py

ACTIVE_KERNEL = _kernel.KERNEL


@dataclass
class Matcher:
    """Compiled automaton over a lexicon version.

    Immutable after compile: lexicon updates compile a new matcher, they
    never mutate a live one, so instances are safe to share across
    concurrent scans.
    """

    lexicon_version: int
    surfaces: tuple[str, ...]
    concepts: tuple[str, ...]
    trans: dict[int, int] = field(repr=False)
    fail: array = field(repr=False)
    out_len: array = field(repr=False)
    out_pat: array = field(repr=False)
    out_link: array = field(repr=False)

    @property
    def state_count(self) -> int:
        return len(self.fail)


def compile_matcher(lexicon: Lexicon) -> Matcher:
    """Build the goto trie, failure links, and output chains.

    Surfaces are inserted in sorted order so state numbering (and with it
    every downstream artifact) is deterministic for a given lexicon.
    """
    surface_map = lexicon.surfaces()
    if not surface_map:
        raise CompileError("cannot compile an empty lexicon")
    for surface in surface_map:
        if not surface:
            raise CompileError("lexicon contains an empty term")

    surfaces = tuple(sorted(surface_map))
    concepts = tuple(surface_map[s] for s in surfaces)

    trans: dict[int, int] = {}
    children: list[list[tuple[int, int]]] = [[]]
    out_len = [0]
    out_pat = [-1]

    for pat_id, surface in enumerate(surfaces):
        state = 0
        for ch in surface:
            cp = ord(ch)
            key = (state << 21) | cp
            nxt = trans.get(key)
            if nxt is None:
                nxt = len(children)
                trans[key] = nxt
                children[state].append((cp, nxt))
                children.append([])
                out_len.append(0)
                out_pat.append(-1)
            state = nxt
        out_len[state] = len(surface)
        out_pat[state] = pat_id

    # Failure links by BFS; out_link[s] is the nearest failure ancestor
    # that ends a pattern (0 = none), giving each state its output chain.
    n_states = len(children)
    fail = [0] * n_states
    out_link = [0] * n_states
    queue: deque[int] = deque()
    for cp, child in children[0]:
        queue.append(child)
    while queue:
        state = queue.popleft()
        for cp, child in children[state]:
            f = fail[state]
            while f and ((f << 21) | cp) not in trans:
                f = fail[f]
            fail[child] = trans.get((f << 21) | cp, 0)
            if fail[child] == child:
                fail[child] = 0
            target = fail[child]
            out_link[child] = target if out_len[target] else out_link[target]
            queue.append(child)

    return Matcher(
        lexicon_version=lexicon.version,
        surfaces=surfaces,
        concepts=concepts,
        trans=trans,
        fail=array("i", fail),
        out_len=array("i", out_len),
        out_pat=array("i", out_pat),
        out_link=array("i", out_link),
    )


def scan(matcher: Matcher, text: str | bytes, doc_id: str = "") -> list[AnnotationSpan]:
    """Annotate every lexicon occurrence in ``text``.

    Returns spans sorted by start, non-overlapping under the
    leftmost-longest discipline, with method ``automaton`` and score 1.0.
    Offsets are byte offsets into the UTF-8 encoding of the text.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InputError(f"text is not valid UTF-8: {exc}") from exc
    if not text:
        return []

    folded = fold_text(text)
    raw = _kernel.raw_matches(
        folded, matcher.trans, matcher.fail, matcher.out_len,
        matcher.out_pat, matcher.out_link,
    )
    if not raw:
        return []

    # Leftmost-longest selection: earliest start wins, longest at a tie,
    # overlaps with an already-selected match are dropped.
    raw.sort(key=lambda m: (m[0], m[0] - m[1]))
    picked = []
    last_end = 0
    for start, end, pat in raw:
        if start >= last_end:
            picked.append((start, end, pat))
            last_end = end

    if text.isascii():
        boff = None
    else:
        boff = byte_offsets(text)
    spans = []
    for start, end, pat in picked:
        b_start = start if boff is None else boff[start]
        b_end = end if boff is None else boff[end]
        spans.append(
            AnnotationSpan(
                doc_id=doc_id,
                start=b_start,
                end=b_end,
                surface=text[start:end],
                concept=matcher.concepts[pat],
                method="automaton",
                score=1.0,
            )
        )
    return spans
