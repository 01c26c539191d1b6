"""Knowledge-graph query expansion.

Expands a keyword query (and optional context) into a weighted structured
query using article titles, redirects and the link graph between articles.
"""

from qexpand.corpus import CorpusIndex, build_index
from qexpand.errors import QExpandError
from qexpand.graph import Article, KnowledgeGraph, load_graph
from qexpand.lexical import WeightedQuery
from qexpand.pipeline import PipelineConfig, expand
from qexpand.query import StructuredQuery, WeightVector, render_json, render_text

__version__ = "0.1.0"

__all__ = [
    "Article",
    "CorpusIndex",
    "KnowledgeGraph",
    "PipelineConfig",
    "QExpandError",
    "StructuredQuery",
    "WeightVector",
    "WeightedQuery",
    "build_index",
    "expand",
    "load_graph",
    "render_json",
    "render_text",
]
