"""Index directory: pickled graph and corpus index plus a JSON manifest."""

from __future__ import annotations

import json
import pickle
from pathlib import Path

from qexpand.corpus import CorpusIndex
from qexpand.errors import IndexFormatError
from qexpand.graph import KnowledgeGraph

FORMAT_VERSION = 1
MANIFEST = "manifest.json"
GRAPH_FILE = "graph.pkl"
CORPUS_FILE = "corpus.pkl"


def save_index(out_dir: str | Path, graph: KnowledgeGraph, corpus: CorpusIndex) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    # Build the lazy title indexes now so every load starts from the same state.
    graph.term_index, graph.bigram_index
    with open(out / GRAPH_FILE, "wb") as fh:
        pickle.dump(graph, fh, protocol=pickle.HIGHEST_PROTOCOL)
    with open(out / CORPUS_FILE, "wb") as fh:
        pickle.dump(corpus, fh, protocol=pickle.HIGHEST_PROTOCOL)
    manifest = {
        "format_version": FORMAT_VERSION,
        "files": {"graph": GRAPH_FILE, "corpus": CORPUS_FILE},
        "counts": {
            "articles": len(graph.articles),
            "concepts": len(graph),
            "redirects": len(graph.articles) - len(graph),
            "edges": graph.edge_count,
            "shadowed_titles": graph.shadowed_titles,
            "documents": len(corpus),
            "ngrams": len(corpus.ngrams),
        },
        "max_ngram": corpus.max_n,
    }
    (out / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8")
    return manifest


def load_index(index_dir: str | Path) -> tuple[KnowledgeGraph, CorpusIndex, dict]:
    root = Path(index_dir)
    try:
        manifest = json.loads((root / MANIFEST).read_text("utf-8"))
    except FileNotFoundError:
        raise IndexFormatError(f"no {MANIFEST} in {root}") from None
    except json.JSONDecodeError as exc:
        raise IndexFormatError(f"unreadable manifest: {exc}") from None
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise IndexFormatError(f"index format {version!r} is not supported (expected {FORMAT_VERSION})")
    try:
        with open(root / manifest["files"]["graph"], "rb") as fh:
            graph = pickle.load(fh)
        with open(root / manifest["files"]["corpus"], "rb") as fh:
            corpus = pickle.load(fh)
    except (OSError, KeyError, pickle.UnpicklingError) as exc:
        raise IndexFormatError(f"cannot read index files: {exc}") from None
    if not isinstance(graph, KnowledgeGraph) or not isinstance(corpus, CorpusIndex):
        raise IndexFormatError("index files hold unexpected objects")
    return graph, corpus, manifest
