from __future__ import annotations

import pytest

from fdcloud.annotate import (
    AmbiguousEntry,
    Lexicon,
    Pipeline,
    compile_matcher,
    default_pipeline,
    disambiguate,
    resolve_acronyms,
    run_pipeline,
    scan,
)
from fdcloud.errors import PipelineStageError

LEX = Lexicon(
    entries={
        "wheat": "crop:wheat",
        "food security index": "topic:fsi",
        "fungicide": "disease:wheat-rust",
    },
    ambiguous=(AmbiguousEntry("rust", ("disease:wheat-rust", "tool:rust-lang")),),
)

TEXT = (
    "The Food Security Index (FSI) covers wheat. FSI tracks rust damage "
    "where fungicide fails."
)


class TestComposition:
    def test_default_pipeline_equals_manual_stage_application(self):
        matcher = compile_matcher(LEX)
        _, spans = run_pipeline(default_pipeline(matcher, LEX.ambiguous, doc_id="d"), TEXT)

        by_hand = scan(matcher, TEXT, doc_id="d")
        by_hand = resolve_acronyms(TEXT, by_hand, doc_id="d")
        by_hand = disambiguate(by_hand, LEX.ambiguous, TEXT)
        assert spans == by_hand

    def test_pipeline_starts_from_empty_spans(self):
        seen = []

        def probe(text, spans):
            seen.append(list(spans))
            return text, spans

        run_pipeline(Pipeline(stages=(probe,)), "anything")
        assert seen == [[]]

    def test_stages_run_left_to_right_and_thread_text(self):
        def upper(text, spans):
            return text.upper(), spans

        def exclaim(text, spans):
            return text + "!", spans

        text, _ = run_pipeline(Pipeline(stages=(upper, exclaim)), "quiet")
        assert text == "QUIET!"

    def test_full_pipeline_resolves_acronym_and_ambiguity(self):
        matcher = compile_matcher(LEX)
        _, spans = run_pipeline(default_pipeline(matcher, LEX.ambiguous), TEXT)
        by_surface = {s.surface: s for s in spans}
        assert by_surface["FSI"].concept == "topic:fsi"
        assert by_surface["FSI"].method == "acronym"
        assert by_surface["rust"].concept == "disease:wheat-rust"


class TestFailures:
    def test_stage_error_reports_failing_index(self):
        def ok(text, spans):
            return text, spans

        def boom(text, spans):
            raise ValueError("stage exploded")

        with pytest.raises(PipelineStageError) as err:
            run_pipeline(Pipeline(stages=(ok, ok, boom)), "x")
        assert err.value.stage_index == 2
        assert "stage exploded" in str(err.value)
        assert isinstance(err.value.__cause__, ValueError)

    def test_later_stages_do_not_run_after_a_failure(self):
        calls = []

        def boom(text, spans):
            raise RuntimeError("dead")

        def never(text, spans):
            calls.append(1)
            return text, spans

        with pytest.raises(PipelineStageError):
            run_pipeline(Pipeline(stages=(boom, never)), "x")
        assert calls == []
