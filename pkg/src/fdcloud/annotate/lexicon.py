"""Shared-terminology lexicon: surface terms mapped to concept ids.

Surfaces are stored in canonical (lowercased) form. A surface that maps
to more than one concept is not a plain entry: it is modeled as an
``AmbiguousEntry`` carrying the candidate list, and the disambiguation
stage picks the winner per document.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ValidationError


def fold_char(c: str) -> str:
    low = c.lower()
    return low if len(low) == 1 else c


def fold_text(text: str) -> str:
    """Length-preserving case fold.

    ``str.lower`` is a single C call and almost always length-preserving;
    the per-character path only runs for the handful of code points whose
    lowercase form expands (those are left unchanged to keep offsets
    aligned).
    """
    folded = text.lower()
    if len(folded) == len(text):
        return folded
    return "".join(fold_char(c) for c in text)


@dataclass(frozen=True)
class AmbiguousEntry:
    surface: str
    candidates: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "surface", fold_text(self.surface))
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if not self.surface:
            raise ValidationError("ambiguous entry has empty surface")
        if len(self.candidates) < 2:
            raise ValidationError(
                f"ambiguous surface {self.surface!r} needs >= 2 candidates"
            )
        if len(set(self.candidates)) != len(self.candidates):
            raise ValidationError(
                f"duplicate candidates for surface {self.surface!r}"
            )


@dataclass(frozen=True)
class Lexicon:
    entries: dict[str, str]
    ambiguous: tuple[AmbiguousEntry, ...] = ()
    version: int = 1

    def __post_init__(self) -> None:
        folded: dict[str, str] = {}
        for surface, concept in self.entries.items():
            key = fold_text(surface)
            if key in folded and folded[key] != concept:
                raise ValidationError(
                    f"surface {key!r} maps to both {folded[key]!r} and "
                    f"{concept!r}; model it as an ambiguous entry"
                )
            folded[key] = concept
        object.__setattr__(self, "entries", folded)
        object.__setattr__(self, "ambiguous", tuple(self.ambiguous))
        amb_seen: set[str] = set()
        for entry in self.ambiguous:
            if entry.surface in folded:
                raise ValidationError(
                    f"surface {entry.surface!r} is both a plain entry and ambiguous"
                )
            if entry.surface in amb_seen:
                raise ValidationError(
                    f"surface {entry.surface!r} has two ambiguous entries"
                )
            amb_seen.add(entry.surface)

    def surfaces(self) -> dict[str, str]:
        """All matchable surfaces with their initial concept.

        Ambiguous surfaces start at their lexicographically smallest
        candidate; the disambiguation stage may override it later.
        """
        out = dict(self.entries)
        for entry in self.ambiguous:
            out[entry.surface] = min(entry.candidates)
        return out


def load_lexicon(path: str | Path) -> Lexicon:
    """Read a lexicon file: JSON term map + ambiguous array + version."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if "version" not in data:
        raise ValidationError("lexicon file is missing the version field")
    ambiguous = tuple(
        AmbiguousEntry(surface=e["surface"], candidates=tuple(e["candidates"]))
        for e in data.get("ambiguous", [])
    )
    return Lexicon(
        entries=dict(data.get("terms", {})),
        ambiguous=ambiguous,
        version=int(data["version"]),
    )


def dump_lexicon(lexicon: Lexicon, path: str | Path) -> None:
    data = {
        "version": lexicon.version,
        "terms": dict(sorted(lexicon.entries.items())),
        "ambiguous": [
            {"surface": e.surface, "candidates": list(e.candidates)}
            for e in lexicon.ambiguous
        ],
    }
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
