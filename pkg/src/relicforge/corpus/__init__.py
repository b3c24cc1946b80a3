"""Corpus management: manifests, curation pipeline, train/test splits."""

from relicforge.corpus.manifest import (
    MANIFEST_NAME,
    CorpusManifest,
    Record,
    Split,
    Status,
)
from relicforge.corpus.pipeline import (
    DEFAULT_EXTENSIONS,
    FOLD_COUNT,
    TRAIN_FRACTION,
    CorpusConfig,
    curate,
    dedup,
    filter_trivial,
    ingest,
    load_ast,
    normalize_text,
    read_normalized,
    split,
)

__all__ = [
    "MANIFEST_NAME",
    "CorpusManifest",
    "Record",
    "Split",
    "Status",
    "DEFAULT_EXTENSIONS",
    "FOLD_COUNT",
    "TRAIN_FRACTION",
    "CorpusConfig",
    "curate",
    "dedup",
    "filter_trivial",
    "ingest",
    "load_ast",
    "normalize_text",
    "read_normalized",
    "split",
]
