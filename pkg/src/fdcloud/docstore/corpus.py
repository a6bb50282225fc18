"""Deterministic synthetic corpora for demos, load runs, and test fixtures."""

from __future__ import annotations

import random

from ..annotate.lexicon import AmbiguousEntry, Lexicon

# Field-report flavored vocabulary; overlaps the demo lexicon on purpose so
# generated texts are annotatable out of the box.
_TERMS = (
    "wheat", "rust", "barley", "maize", "soil", "moisture", "yield",
    "harvest", "fungicide", "spore", "leaf", "stem", "blight", "drought",
    "irrigation", "rotation", "pasture", "nitrogen", "forecast", "sensor",
    "plot", "field", "sample", "survey", "infestation", "outbreak",
    "resistance", "variety", "seeding", "canopy",
)
_FILLER = (
    "the", "a", "observed", "in", "near", "shows", "across", "after",
    "during", "measured", "reported", "between", "with", "under", "and",
    "per", "on", "plots", "levels", "readings",
)
_AUTHORS = ("rossi", "bianchi", "ferrari", "russo", "kovacs", "smith")
_MEDIA_CYCLE = 50  # every Nth document is a binary placeholder


def _sentence(rng: random.Random) -> str:
    n = rng.randint(6, 12)
    words = []
    for i in range(n):
        pool = _TERMS if rng.random() < 0.45 else _FILLER
        words.append(rng.choice(pool))
    words[0] = words[0].capitalize()
    return " ".join(words) + "."


def _date(rng: random.Random) -> str:
    year = rng.randint(2024, 2026)
    month = rng.randint(1, 12)
    day = rng.randint(1, 28)
    return f"{year:04d}-{month:02d}-{day:02d}"


def generate_corpus(seed: int, count: int) -> list[tuple[bytes, dict]]:
    """Produce ``count`` (bytes, metadata) pairs, reproducible from ``seed``.

    Documents are pairwise distinct (a serial line is embedded in each body)
    so ingesting the whole corpus yields exactly ``count`` ids. Most entries
    are plain text; every fiftieth is a small binary blob exercising the
    non-text ingestion path.
    """
    rng = random.Random(seed)
    out: list[tuple[bytes, dict]] = []
    for serial in range(count):
        author = rng.choice(_AUTHORS)
        date = _date(rng)
        title = f"Report {serial:04d} on {rng.choice(_TERMS)}"
        if serial % _MEDIA_CYCLE == _MEDIA_CYCLE - 1 and serial > 0:
            data = b"\x89PNG\r\n\x1a\n" + serial.to_bytes(4, "big") + rng.randbytes(32)
            media_type = "image/png"
        else:
            body = " ".join(_sentence(rng) for _ in range(rng.randint(3, 10)))
            data = f"{body}\n[record {serial:04d}]\n".encode("utf-8")
            media_type = "text/plain"
        metadata = {
            "uri": f"https://corpus.example/docs/{serial:04d}",
            "title": title,
            "author": author,
            "date": date,
            "media_type": media_type,
        }
        out.append((data, metadata))
    return out


def corpus_authors() -> tuple[str, ...]:
    return _AUTHORS


def corpus_terms() -> tuple[str, ...]:
    return _TERMS


def demo_lexicon() -> Lexicon:
    """Small built-in lexicon matching the generated corpus vocabulary."""
    terms = {
        "wheat": "crop:wheat",
        "wheat rust": "disease:wheat-rust",
        "barley": "crop:barley",
        "maize": "crop:maize",
        "leaf rust": "disease:leaf-rust",
        "stem rust": "disease:stem-rust",
        "fungicide": "treatment:fungicide",
        "irrigation": "practice:irrigation",
        "crop rotation": "practice:rotation",
        "nitrogen": "input:nitrogen",
    }
    ambiguous = (
        AmbiguousEntry(
            surface="rust",
            candidates=("disease:leaf-rust", "disease:stem-rust", "disease:wheat-rust"),
        ),
    )
    return Lexicon(entries=terms, ambiguous=ambiguous, version="demo-1")
