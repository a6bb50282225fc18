"""Deterministic N-Triples emission and a matching line parser.

Each annotation span expands to exactly five triples under a fixed
minimal vocabulary; output lines are sorted bytewise so identical inputs
produce byte-identical files. The parser accepts the subset the emitter
produces (IRIs, plain and typed literals, comments) and is also used by
file validation.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

from ..errors import EmissionError, InputError
from .spans import AnnotationSpan

FD_NS = "http://fdcloud.example/ns#"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
XSD_INTEGER = "http://www.w3.org/2001/XMLSchema#integer"

ANNOTATION_CLASS = FD_NS + "Annotation"
PRED_BEGIN = FD_NS + "begin"
PRED_END = FD_NS + "end"
PRED_CONCEPT = FD_NS + "concept"
PRED_SOURCE = FD_NS + "source"

# object is ("iri", value) or ("literal", lexical, datatype_or_None)
Term = tuple
Triple = tuple[str, str, Term]

_IRI_BAD = re.compile(r'[\x00-\x20<>"{}|^`\\]')


def _escape_literal(value: str) -> str:
    return (
        value.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def _unescape_literal(value: str) -> str:
    out = []
    i = 0
    while i < len(value):
        c = value[i]
        if c == "\\" and i + 1 < len(value):
            nxt = value[i + 1]
            mapped = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t"}.get(nxt)
            if mapped is not None:
                out.append(mapped)
                i += 2
                continue
        out.append(c)
        i += 1
    return "".join(out)


def _iri(value: str) -> str:
    if _IRI_BAD.search(value):
        raise EmissionError(f"character not allowed in IRI: {value!r}")
    return f"<{value}>"


def format_triple(triple: Triple) -> str:
    subject, predicate, obj = triple
    if obj[0] == "iri":
        obj_text = _iri(obj[1])
    else:
        _, lexical, datatype = obj
        obj_text = f'"{_escape_literal(lexical)}"'
        if datatype:
            obj_text += f"^^{_iri(datatype)}"
    return f"{_iri(subject)} {_iri(predicate)} {obj_text} ."


def emit_rdf(
    doc_id: str,
    doc_uri: str,
    spans: Sequence[AnnotationSpan],
    tag_map: dict[str, str],
) -> str:
    """Serialize spans as N-Triples, five per span, bytewise sorted."""
    lines = []
    for span in spans:
        tag_uri = tag_map.get(span.concept)
        if tag_uri is None:
            raise EmissionError(
                f"no tag mapped for concept {span.concept!r} in document {doc_id!r}"
            )
        span_uri = f"{doc_uri}#ann-{span.start}-{span.end}"
        triples: list[Triple] = [
            (span_uri, RDF_TYPE, ("iri", ANNOTATION_CLASS)),
            (span_uri, PRED_BEGIN, ("literal", str(span.start), XSD_INTEGER)),
            (span_uri, PRED_END, ("literal", str(span.end), XSD_INTEGER)),
            (span_uri, PRED_CONCEPT, ("iri", tag_uri)),
            (span_uri, PRED_SOURCE, ("iri", doc_uri)),
        ]
        lines.extend(format_triple(t) for t in triples)
    lines.sort(key=lambda line: line.encode("utf-8"))
    return "".join(line + "\n" for line in lines)


_LINE = re.compile(
    r"^<([^<>\s]*)>\s+<([^<>\s]*)>\s+"
    r"(?:<([^<>\s]*)>|\"((?:[^\"\\]|\\.)*)\"(?:\^\^<([^<>\s]*)>)?)"
    r"\s*\.\s*$"
)


def check_ntriples_line(line: str) -> str | None:
    """None when the line parses; otherwise a short failure message."""
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    if not stripped.endswith("."):
        return "line does not end with '.'"
    if _LINE.match(line.strip()) is None:
        return "line does not match the triple grammar"
    return None


def parse_ntriples(text: str) -> list[Triple]:
    triples: list[Triple] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _LINE.match(stripped)
        if m is None:
            raise InputError(f"line {lineno}: not a valid triple: {stripped!r}")
        subject, predicate, obj_iri, obj_lit, obj_dt = m.groups()
        if obj_iri is not None:
            obj: Term = ("iri", obj_iri)
        else:
            obj = ("literal", _unescape_literal(obj_lit), obj_dt)
        triples.append((subject, predicate, obj))
    return triples


def serialize_triples(triples: Iterable[Triple]) -> str:
    lines = [format_triple(t) for t in triples]
    lines.sort(key=lambda line: line.encode("utf-8"))
    return "".join(line + "\n" for line in lines)
