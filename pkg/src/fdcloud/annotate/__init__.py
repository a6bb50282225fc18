"""Streaming annotation pipeline: matcher, filters, RDF emission."""

from .acronyms import resolve_acronyms
from .disambig import disambiguate
from .filter_server import FilterClient, FilterServer, run_cascade
from .lexicon import AmbiguousEntry, Lexicon, dump_lexicon, fold_text, load_lexicon
from .matcher import ACTIVE_KERNEL, Matcher, compile_matcher, scan
from .pipeline import (
    Pipeline,
    acronym_stage,
    default_pipeline,
    disambiguation_stage,
    run_pipeline,
    scan_stage,
)
from .rdf import check_ntriples_line, emit_rdf, parse_ntriples, serialize_triples
from .spans import AnnotationSpan

__all__ = [
    "ACTIVE_KERNEL",
    "AmbiguousEntry",
    "AnnotationSpan",
    "FilterClient",
    "FilterServer",
    "Lexicon",
    "Matcher",
    "Pipeline",
    "acronym_stage",
    "check_ntriples_line",
    "compile_matcher",
    "default_pipeline",
    "disambiguate",
    "disambiguation_stage",
    "dump_lexicon",
    "emit_rdf",
    "fold_text",
    "load_lexicon",
    "parse_ntriples",
    "resolve_acronyms",
    "run_cascade",
    "run_pipeline",
    "scan",
    "scan_stage",
    "serialize_triples",
]
