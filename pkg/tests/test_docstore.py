from __future__ import annotations

import hashlib
import random

import pytest

from fdcloud.docstore import (
    DocumentStore,
    InvertedIndex,
    Query,
    demo_lexicon,
    generate_corpus,
    tokenize,
    validate_file,
)
from fdcloud.errors import (
    DomainError,
    NotFoundError,
    UsageError,
    ValidationError,
)

from oracles import jaccard_oracle, search_oracle, tokenize_oracle


def meta(**over):
    base = {
        "uri": "https://x.example/doc",
        "title": "t",
        "author": "rossi",
        "date": "2025-01-15",
        "media_type": "text/plain",
    }
    base.update(over)
    return base


class TestIngest:
    def test_id_is_the_content_hash(self, store):
        data = b"Wheat rust spreads."
        doc_id = store.ingest(data, meta())
        assert doc_id == hashlib.sha256(data).hexdigest()
        assert store.raw_bytes(doc_id) == data
        assert doc_id in store

    def test_reingest_is_idempotent(self, store):
        data = b"same bytes"
        a = store.ingest(data, meta(title="first"))
        b = store.ingest(data, meta(title="second"))
        assert a == b
        assert len(store) == 1
        assert store.get(a).title == "first"

    def test_zero_length_is_rejected(self, store):
        with pytest.raises(ValidationError):
            store.ingest(b"", meta())

    def test_missing_metadata_fields_are_named(self, store):
        bad = meta()
        del bad["author"]
        del bad["date"]
        with pytest.raises(ValidationError, match="author.*date"):
            store.ingest(b"x", bad)

    def test_text_documents_get_phrase_elements(self, store):
        text = "First point. Second one! Third?"
        doc_id = store.ingest(text.encode(), meta())
        record = store.get(doc_id)
        assert record.text == text
        assert [k for k, _ in record.elements] == ["phrase"] * 3
        raw = text.encode()
        pieces = [raw[a:b].decode() for _, (a, b) in record.elements]
        assert pieces == ["First point.", "Second one!", "Third?"]

    def test_phrase_ranges_are_byte_offsets(self, store):
        text = "Étude one. Result two."
        doc_id = store.ingest(text.encode(), meta())
        record = store.get(doc_id)
        raw = text.encode()
        assert [raw[a:b].decode() for _, (a, b) in record.elements] == [
            "Étude one.",
            "Result two.",
        ]

    def test_non_text_documents_get_stub_element(self, store):
        doc_id = store.ingest(b"\x89PNG\r\n\x1a\n123", meta(media_type="image/png"))
        record = store.get(doc_id)
        assert record.text == ""
        assert record.elements == (("image", (0, 0)),)
        other = store.ingest(b"col1,col2", meta(media_type="application/csv"))
        assert store.get(other).elements == (("table", (0, 0)),)

    def test_empty_uri_falls_back_to_urn(self, store):
        doc_id = store.ingest(b"body", meta(uri=""))
        assert store.get(doc_id).uri == f"urn:fdc:doc:{doc_id}"

    def test_unknown_id_raises(self, store):
        with pytest.raises(NotFoundError):
            store.get("0" * 64)


class TestJournal:
    def test_reload_restores_records_tags_and_spans(self, store, tmp_path):
        a = store.ingest(b"wheat doc one.", meta(title="one"))
        b = store.ingest(b"rust doc two.", meta(title="two"))
        store.attach_user_tag(a, "tag:wheat", span=(0, 5))
        store.add_tags(b, {"tag:rust"})

        reopened = DocumentStore(store.data_dir)
        assert reopened.all_ids() == store.all_ids()
        ra = reopened.get(a)
        assert ra.tag_ids == {"tag:wheat"}
        assert len(ra.spans) == 1 and ra.spans[0].method == "user"
        assert reopened.get(b).tag_ids == {"tag:rust"}
        assert reopened.get(b).title == "two"

    def test_last_journal_record_wins(self, store):
        a = store.ingest(b"doc body", meta())
        store.add_tags(a, {"t1"})
        store.add_tags(a, {"t2"})
        reopened = DocumentStore(store.data_dir)
        assert reopened.get(a).tag_ids == {"t1", "t2"}

    def test_reload_rebuilds_the_search_index(self, store):
        store.ingest(b"wheat in the north field", meta())
        reopened = DocumentStore(store.data_dir)
        assert len(reopened.search(Query(terms=("wheat",)))) == 1


class TestIndex:
    def test_tokenize_matches_oracle(self):
        samples = [
            "Wheat, rust; BARLEY_x 42 café 世界",
            "under_score stays split",
            "",
            "a-b c.d",
        ]
        for text in samples:
            assert tokenize(text) == tokenize_oracle(text)

    def test_reindex_equals_rebuild(self):
        live = InvertedIndex()
        texts = {"d1": "wheat wheat rust", "d2": "barley field"}
        for doc_id, text in texts.items():
            live.index_document(doc_id, text)
        texts["d1"] = "maize only now"
        live.index_document("d1", texts["d1"])

        fresh = InvertedIndex()
        for doc_id, text in texts.items():
            fresh.index_document(doc_id, text)
        assert live.postings == fresh.postings
        assert live.doc_token_counts == fresh.doc_token_counts

    def test_remove_unknown_document_raises(self):
        with pytest.raises(NotFoundError):
            InvertedIndex().remove_document("nope")

    def test_candidates_are_conjunctive(self):
        idx = InvertedIndex()
        idx.index_document("d1", "wheat rust")
        idx.index_document("d2", "wheat")
        assert idx.candidates(("wheat", "rust")) == {"d1"}
        assert idx.candidates(("wheat",)) == {"d1", "d2"}
        assert idx.candidates(("missing",)) == set()


class TestQueryValidation:
    def test_needs_some_criterion(self):
        with pytest.raises(ValidationError):
            Query()

    def test_limit_must_be_positive(self):
        with pytest.raises(ValidationError):
            Query(terms=("x",), limit=0)

    def test_inverted_date_range(self):
        with pytest.raises(ValidationError):
            Query(terms=("x",), date_range=("2025-02-01", "2025-01-01"))

    def test_filter_only_queries_are_allowed(self):
        Query(author_filter="rossi")
        Query(date_range=("2025-01-01", "2025-02-01"))


class TestSearch:
    def test_ranking_prefers_higher_term_frequency(self, store):
        a = store.ingest(b"wheat wheat wheat", meta())
        b = store.ingest(b"wheat once only here", meta())
        results = store.search(Query(terms=("wheat",)))
        assert [doc_id for doc_id, _ in results] == [a, b]
        assert results[0][1] > results[1][1]

    def test_terms_are_case_folded(self, store):
        a = store.ingest(b"Wheat Rust report", meta())
        assert store.search(Query(terms=("WHEAT", "rust")))[0][0] == a

    def test_author_and_date_filters(self, store):
        a = store.ingest(b"wheat one", meta(author="rossi", date="2025-03-01"))
        b = store.ingest(b"wheat two", meta(author="smith", date="2025-06-15"))
        assert {r[0] for r in store.search(Query(terms=("wheat",), author_filter="rossi"))} == {a}
        hits = store.search(
            Query(terms=("wheat",), date_range=("2025-06-15", "2025-12-31"))
        )
        assert {r[0] for r in hits} == {b}

    def test_within_restricts_candidates(self, store):
        a = store.ingest(b"wheat one", meta())
        store.ingest(b"wheat two", meta())
        hits = store.search(Query(terms=("wheat",), within=frozenset({a})))
        assert [r[0] for r in hits] == [a]

    def test_randomized_against_linear_oracle(self, store):
        rng = random.Random(77)
        vocab = ("wheat", "rust", "barley", "soil", "yield", "field", "dry")
        authors = ("rossi", "smith", "kovacs")
        docs = {}
        for i in range(150):
            words = [rng.choice(vocab) for _ in range(rng.randint(1, 20))]
            text = " ".join(words) + f" serial{i}"
            author = rng.choice(authors)
            date = f"2025-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
            doc_id = store.ingest(
                text.encode(), meta(author=author, date=date, uri=f"https://x/{i}")
            )
            docs[doc_id] = {"text": text, "author": author, "date": date}

        for _ in range(50):
            terms = tuple(
                rng.sample(vocab, rng.randint(1, 3))
            )
            author = rng.choice(authors) if rng.random() < 0.3 else None
            date_range = None
            if rng.random() < 0.3:
                lo = f"2025-{rng.randint(1, 6):02d}-01"
                hi = f"2025-{rng.randint(7, 12):02d}-28"
                date_range = (lo, hi)
            limit = rng.randint(1, 30)
            got = store.search(
                Query(terms=terms, author_filter=author, date_range=date_range, limit=limit)
            )
            want = search_oracle(docs, terms, author, date_range, limit)
            assert [g[0] for g in got] == [w[0] for w in want]
            for (_, gs), (_, ws) in zip(got, want):
                assert gs == pytest.approx(ws)


class TestTagsAndRelated:
    def test_attach_tag_and_anchored_span(self, store):
        doc_id = store.ingest(b"wheat rust in field", meta())
        record = store.attach_user_tag(doc_id, "tag:wr", span=(0, 10))
        assert record.tag_ids == {"tag:wr"}
        span = record.spans[0]
        assert (span.start, span.end, span.method, span.surface) == (
            0, 10, "user", "wheat rust",
        )

    def test_attach_is_idempotent(self, store):
        doc_id = store.ingest(b"wheat", meta())
        once = store.attach_user_tag(doc_id, "t", span=(0, 5))
        twice = store.attach_user_tag(doc_id, "t", span=(0, 5))
        assert once == twice
        assert len(twice.spans) == 1

    def test_span_bounds_are_validated(self, store):
        doc_id = store.ingest("café wheat".encode(), meta())
        with pytest.raises(ValidationError):
            store.attach_user_tag(doc_id, "t", span=(0, 99))
        with pytest.raises(ValidationError):
            store.attach_user_tag(doc_id, "t", span=(0, 4))  # splits the é

    def test_set_spans_keeps_user_spans(self, store):
        from fdcloud.annotate.spans import AnnotationSpan

        doc_id = store.ingest(b"wheat rust", meta())
        store.attach_user_tag(doc_id, "tag:user", span=(0, 5))
        machine = AnnotationSpan(doc_id, 6, 10, "rust", "c3", "automaton", 1.0)
        record = store.set_spans(doc_id, (machine,))
        methods = sorted(s.method for s in record.spans)
        assert methods == ["automaton", "user"]
        record = store.set_spans(doc_id, ())
        assert [s.method for s in record.spans] == ["user"]

    def test_related_ranking_matches_jaccard(self, store):
        ids = [store.ingest(f"doc {i}".encode(), meta()) for i in range(4)]
        tag_sets = [
            {"a", "b", "c"},
            {"a", "b"},
            {"a"},
            {"x"},
        ]
        for doc_id, tags in zip(ids, tag_sets):
            store.add_tags(doc_id, tags)
        got = store.related_documents(ids[0], k=3)
        want = sorted(
            (
                (other, jaccard_oracle(tag_sets[0], tag_sets[j]))
                for j, other in enumerate(ids)
                if other != ids[0]
            ),
            key=lambda r: (-r[1], r[0]),
        )
        assert got == [(d, pytest.approx(s)) for d, s in want]

    def test_related_requires_positive_k(self, store):
        doc_id = store.ingest(b"x", meta())
        with pytest.raises(DomainError):
            store.related_documents(doc_id, k=0)


class TestValidateFile:
    def test_clean_utf8_has_no_findings(self):
        assert validate_file("ok text\n".encode(), "utf8-text") == []

    def test_bad_utf8_reports_line(self):
        data = b"fine line\nalso fine\nbroken \xff here"
        findings = validate_file(data, "utf8-text")
        assert len(findings) == 1
        assert findings[0][0] == 3
        assert "byte offset" in findings[0][1]

    def test_ntriples_findings_name_lines(self):
        text = (
            "<http://x/s> <http://x/p> <http://x/o> .\n"
            "garbage line\n"
            "# comment\n"
            "<http://x/s> <http://x/p> missing dot\n"
        )
        findings = validate_file(text.encode(), "ntriples")
        assert [line for line, _ in findings] == [2, 4]

    def test_json_findings(self):
        assert validate_file(b'{"a": 1}', "json") == []
        findings = validate_file(b'{"a": 1,\n "b": }', "json")
        assert len(findings) == 1
        assert findings[0][0] == 2

    def test_unknown_format_is_a_usage_error(self):
        with pytest.raises(UsageError):
            validate_file(b"x", "xml")


class TestCorpus:
    def test_same_seed_reproduces_the_corpus(self):
        assert generate_corpus(9, 120) == generate_corpus(9, 120)
        assert generate_corpus(9, 120) != generate_corpus(10, 120)

    def test_every_fiftieth_is_binary(self):
        corpus = generate_corpus(1, 120)
        assert len(corpus) == 120
        for serial, (data, metadata) in enumerate(corpus):
            if serial % 50 == 49:
                assert metadata["media_type"] == "image/png"
                assert data.startswith(b"\x89PNG")
            else:
                assert metadata["media_type"] == "text/plain"
                assert f"[record {serial:04d}]" in data.decode()

    def test_corpus_ingests_to_distinct_ids(self, store):
        corpus = generate_corpus(3, 80)
        ids = {store.ingest(data, metadata) for data, metadata in corpus}
        assert len(ids) == 80

    def test_demo_lexicon_compiles_and_is_ambiguous_on_rust(self):
        from fdcloud.annotate import compile_matcher, scan

        lex = demo_lexicon()
        matcher = compile_matcher(lex)
        assert any(e.surface == "rust" for e in lex.ambiguous)
        spans = scan(matcher, "wheat rust and fungicide")
        assert [s.concept for s in spans] == ["disease:wheat-rust", "treatment:fungicide"]
