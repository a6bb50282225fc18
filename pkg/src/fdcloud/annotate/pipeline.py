"""Filter cascade: ordered stages mapping (text, spans) -> (text, spans).

Running a pipeline is exactly the left-to-right composition of its
stages starting from (text, []); a stage failure aborts the run and
reports the failing stage index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from ..errors import PipelineStageError
from .acronyms import resolve_acronyms
from .disambig import disambiguate
from .lexicon import AmbiguousEntry
from .matcher import Matcher, scan
from .spans import AnnotationSpan

Stage = Callable[[str, list[AnnotationSpan]], "tuple[str, list[AnnotationSpan]]"]


@dataclass(frozen=True)
class Pipeline:
    stages: tuple[Stage, ...]


def run_pipeline(
    pipeline: Pipeline, text: str
) -> tuple[str, list[AnnotationSpan]]:
    spans: list[AnnotationSpan] = []
    for i, stage in enumerate(pipeline.stages):
        try:
            text, spans = stage(text, spans)
        except Exception as exc:
            raise PipelineStageError(i, exc) from exc
    return text, spans


def scan_stage(matcher: Matcher, doc_id: str = "") -> Stage:
    def stage(text: str, spans: list[AnnotationSpan]):
        return text, spans + scan(matcher, text, doc_id=doc_id)

    return stage


def acronym_stage(doc_id: str = "") -> Stage:
    def stage(text: str, spans: list[AnnotationSpan]):
        return text, resolve_acronyms(text, spans, doc_id=doc_id)

    return stage


def disambiguation_stage(ambiguous: Iterable[AmbiguousEntry]) -> Stage:
    entries = tuple(ambiguous)

    def stage(text: str, spans: list[AnnotationSpan]):
        return text, disambiguate(spans, entries, text)

    return stage


def default_pipeline(
    matcher: Matcher,
    ambiguous: Sequence[AmbiguousEntry] = (),
    doc_id: str = "",
) -> Pipeline:
    """scan -> acronym resolution -> disambiguation, in that fixed order."""
    return Pipeline(
        stages=(
            scan_stage(matcher, doc_id=doc_id),
            acronym_stage(doc_id=doc_id),
            disambiguation_stage(ambiguous),
        )
    )
