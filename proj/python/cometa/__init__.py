"""Python bindings for the cometa news analysis engine."""

import json
import os

from ._cometa import (
    CorpusStore,
    Error,
    __version__,
    bipartite_centrality,
    cooccurrence,
    document_term_matrix,
    fit_lda,
    network_centrality,
    score_document,
    tokenize,
    top_terms,
)
from . import _cometa


def corpus_stats(store, corpus_id):
    return json.loads(store.stats_json(corpus_id))


def run_pipeline(data_dir, config):
    """Run an analysis over a stored corpus.

    Returns (key, sections) where sections maps each JSON section name to
    its parsed content, plus ``files`` with the raw bundle bytes.
    """
    key, files = _cometa.run_pipeline_json(os.fspath(data_dir), json.dumps(config))
    manifest = json.loads(files["manifest.json"])
    sections = {name: json.loads(files[path]) for name, path in manifest["sections"].items()}
    return {"key": key, "manifest": manifest, "sections": sections, "files": files}


__all__ = [
    "CorpusStore",
    "Error",
    "__version__",
    "bipartite_centrality",
    "cooccurrence",
    "corpus_stats",
    "document_term_matrix",
    "fit_lda",
    "network_centrality",
    "run_pipeline",
    "score_document",
    "tokenize",
    "top_terms",
]
