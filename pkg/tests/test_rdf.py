from __future__ import annotations

import pytest

from fdcloud.annotate import (
    check_ntriples_line,
    emit_rdf,
    parse_ntriples,
    serialize_triples,
)
from fdcloud.annotate.rdf import (
    ANNOTATION_CLASS,
    PRED_BEGIN,
    PRED_CONCEPT,
    PRED_END,
    PRED_SOURCE,
    RDF_TYPE,
    XSD_INTEGER,
    format_triple,
)
from fdcloud.annotate.spans import AnnotationSpan
from fdcloud.errors import EmissionError, InputError

DOC_URI = "https://corpus.example/docs/0001"
TAGS = {"crop:wheat": "https://fdcloud.example/tags/wheat",
        "disease:wheat-rust": "https://fdcloud.example/tags/wheat-rust"}


def two_spans():
    return [
        AnnotationSpan("d", 0, 5, "wheat", "crop:wheat", "automaton", 1.0),
        AnnotationSpan("d", 7, 11, "rust", "disease:wheat-rust", "automaton", 1.0),
    ]


class TestEmission:
    def test_five_triples_per_span(self):
        out = emit_rdf("d", DOC_URI, two_spans(), TAGS)
        lines = out.splitlines()
        assert len(lines) == 10
        assert all(line.endswith(" .") for line in lines)

    def test_output_is_bytewise_sorted_and_stable(self):
        first = emit_rdf("d", DOC_URI, two_spans(), TAGS)
        lines = first.splitlines()
        assert lines == sorted(lines, key=lambda l: l.encode("utf-8"))
        for _ in range(10):
            assert emit_rdf("d", DOC_URI, two_spans(), TAGS) == first

    def test_span_order_does_not_change_the_file(self):
        spans = two_spans()
        assert emit_rdf("d", DOC_URI, spans, TAGS) == emit_rdf(
            "d", DOC_URI, list(reversed(spans)), TAGS
        )

    def test_triple_content_per_span(self):
        out = emit_rdf("d", DOC_URI, two_spans()[:1], TAGS)
        triples = parse_ntriples(out)
        subject = f"{DOC_URI}#ann-0-5"
        assert set(triples) == {
            (subject, RDF_TYPE, ("iri", ANNOTATION_CLASS)),
            (subject, PRED_BEGIN, ("literal", "0", XSD_INTEGER)),
            (subject, PRED_END, ("literal", "5", XSD_INTEGER)),
            (subject, PRED_CONCEPT, ("iri", TAGS["crop:wheat"])),
            (subject, PRED_SOURCE, ("iri", DOC_URI)),
        }

    def test_unmapped_concept_is_an_error(self):
        with pytest.raises(EmissionError):
            emit_rdf("d", DOC_URI, two_spans(), {"crop:wheat": "https://x/1"})

    def test_iri_with_forbidden_characters_is_an_error(self):
        with pytest.raises(EmissionError):
            format_triple(("http://x/a b", RDF_TYPE, ("iri", "http://x/c")))
        with pytest.raises(EmissionError):
            format_triple(("http://x/a", RDF_TYPE, ("iri", 'http://x/"q')))

    def test_empty_span_list_gives_empty_file(self):
        assert emit_rdf("d", DOC_URI, [], TAGS) == ""


class TestRoundTrip:
    def test_emitted_file_parses_back(self):
        out = emit_rdf("d", DOC_URI, two_spans(), TAGS)
        triples = parse_ntriples(out)
        assert len(triples) == 10
        assert serialize_triples(triples) == out

    def test_literal_escapes_round_trip(self):
        nasty = 'line one\nline "two"\t tab \\ slash\r'
        triple = ("http://x/s", "http://x/p", ("literal", nasty, None))
        line = format_triple(triple)
        assert "\n" not in line
        assert parse_ntriples(line + "\n") == [triple]

    def test_comments_and_blank_lines_are_ignored(self):
        text = "# header\n\n<http://x/s> <http://x/p> <http://x/o> .\n"
        assert parse_ntriples(text) == [("http://x/s", "http://x/p", ("iri", "http://x/o"))]

    def test_parse_error_names_the_line(self):
        text = "<http://x/s> <http://x/p> <http://x/o> .\nnot a triple\n"
        with pytest.raises(InputError, match="line 2"):
            parse_ntriples(text)


class TestLineChecker:
    def test_valid_lines_pass(self):
        assert check_ntriples_line('<http://x/s> <http://x/p> "v" .') is None
        assert check_ntriples_line("# comment") is None
        assert check_ntriples_line("   ") is None
        assert (
            check_ntriples_line(
                '<http://x/s> <http://x/p> "5"^^<http://www.w3.org/2001/XMLSchema#integer> .'
            )
            is None
        )

    def test_missing_terminator(self):
        assert check_ntriples_line("<http://x/s> <http://x/p> <http://x/o>") == (
            "line does not end with '.'"
        )

    def test_garbage_is_reported(self):
        assert check_ntriples_line("just words .") is not None
        assert check_ntriples_line("<a> <b> .") is not None
