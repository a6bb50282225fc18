"""Document storage, indexing, search, validation, and corpus generation."""

from .corpus import corpus_authors, corpus_terms, demo_lexicon, generate_corpus
from .index import InvertedIndex, Query, tokenize
from .store import METADATA_FIELDS, DocumentRecord, DocumentStore
from .validate import FORMATS, validate_file

__all__ = [
    "DocumentRecord",
    "DocumentStore",
    "FORMATS",
    "InvertedIndex",
    "METADATA_FIELDS",
    "Query",
    "corpus_authors",
    "corpus_terms",
    "demo_lexicon",
    "generate_corpus",
    "tokenize",
    "validate_file",
]
