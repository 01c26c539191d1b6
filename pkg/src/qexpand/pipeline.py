"""End-to-end expansion: stopwords, lexical block, topological block, combination."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from qexpand.corpus import CorpusIndex
from qexpand.errors import EmptyQueryError
from qexpand.graph import KnowledgeGraph
from qexpand.lexical import (
    DEFAULT_SYNONYM_CAP,
    WeightedQuery,
    build_lexical_query,
    phrase_synonyms,
    position_options,
    synonym_count,
)
from qexpand.query import StructuredQuery, WeightVector, build_original_query, combine, render_text
from qexpand.text import Phrase, filter_stopwords, phrase_text, tokenize
from qexpand.topology import (
    DEFAULT_MAX_HOPS,
    DEFAULT_RELEVANT_CAP,
    DEFAULT_WCC_ITERATION_CAP,
    Containment,
    TopologicalResult,
    build_hierarchy,
    build_topological_query,
    compute_paths,
    grow_community,
    score_community,
    select_relevant,
    select_relevant_options,
    top_communities,
    top_paths,
)
from qexpand.wcc import Community, wcc_community

logger = logging.getLogger(__name__)


def load_stopwords(path: Optional[str | Path] = None, kind: str = "general") -> frozenset[str]:
    """Read a one-term-per-line stopword file; ``None`` loads the shipped list of ``kind``."""
    if path is None:
        text = resources.files("qexpand.data").joinpath(f"stopwords_{kind}.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.update(tokenize(line))
    return frozenset(words)


@dataclass(frozen=True)
class PipelineConfig:
    weights: WeightVector = field(default_factory=WeightVector)
    max_hops: int = DEFAULT_MAX_HOPS
    synonym_cap: int = DEFAULT_SYNONYM_CAP
    wcc_iteration_cap: int = DEFAULT_WCC_ITERATION_CAP
    relevant_cap: int = DEFAULT_RELEVANT_CAP
    stopwords_general: frozenset[str] = field(default_factory=lambda: load_stopwords(kind="general"))
    stopwords_visual: frozenset[str] = field(default_factory=lambda: load_stopwords(kind="visual"))
    hierarchy_containment: Containment = "formula"

    def __post_init__(self) -> None:
        for name in ("max_hops", "synonym_cap", "wcc_iteration_cap", "relevant_cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.hierarchy_containment not in ("formula", "prose"):
            raise ValueError(f"unknown hierarchy containment {self.hierarchy_containment!r}")

    def filter(self, text: str) -> Phrase:
        return filter_stopwords(tokenize(text), self.stopwords_general, self.stopwords_visual)


@dataclass
class Expansion:
    query: StructuredQuery
    q: Phrase
    c: Phrase
    contextless: bool
    synonyms: list[Phrase]
    lexical_checks: list[dict]
    context_synonym_count: int
    topology: TopologicalResult

    @property
    def lexical(self) -> WeightedQuery:
        return self.query.lexical

    @property
    def topological(self) -> WeightedQuery:
        return self.query.topological

    def render(self) -> str:
        return render_text(self.query)


def topological_expansion(
    graph: KnowledgeGraph,
    q: Phrase,
    c: Phrase,
    query_synonyms: list[Phrase],
    config: PipelineConfig,
) -> TopologicalResult:
    rq = select_relevant(graph, query_synonyms, "query", config.relevant_cap)
    rc = select_relevant_options(graph, position_options(graph, c), "context", config.relevant_cap)
    paths = compute_paths(graph, rq, rc, config.max_hops, q, c)
    kept = top_paths(paths)

    communities: list[Community] = []
    seen: set[frozenset[int]] = set()
    for p in kept:
        k = grow_community(graph, p, config.wcc_iteration_cap)
        if k.members in seen:
            continue
        seen.add(k.members)
        k.score = score_community(graph, k, q, c)
        communities.append(k)
    best = top_communities(communities)
    hierarchies = [build_hierarchy(graph, k, q, config.hierarchy_containment) for k in best]
    qt = build_topological_query(hierarchies, graph) if hierarchies else WeightedQuery()
    return TopologicalResult(
        query=qt,
        relevant_query=rq,
        relevant_context=rc,
        paths=paths,
        kept_paths=kept,
        communities=communities,
        kept_communities=best,
        hierarchies=hierarchies,
    )


def expand(
    graph: KnowledgeGraph,
    corpus: CorpusIndex,
    query: str,
    context: Optional[str] = None,
    config: Optional[PipelineConfig] = None,
) -> Expansion:
    """Expand ``query`` (with optional ``context``) into a structured query.

    Without a context, or when the context is empty after stopword removal,
    the filtered query doubles as the context.
    """
    config = config or PipelineConfig()
    q = config.filter(query)
    if not q:
        raise EmptyQueryError()
    c = config.filter(context) if context is not None else ()
    contextless = not c
    if contextless:
        if context is not None and context.strip():
            logger.info("context %r is empty after stop-word removal; using the query", context)
        c = q

    qo = build_original_query(q)
    synonyms = sorted(phrase_synonyms(graph, q, config.synonym_cap), key=phrase_text)
    checks = []
    for p in synonyms:
        verifiable = len(p) <= corpus.max_n
        freq = corpus.frequency(p) if verifiable else None
        checks.append(
            {
                "phrase": phrase_text(p),
                "original": p == q,
                "frequency": freq,
                "kept": p != q and bool(freq),
            }
        )
    ql = build_lexical_query(synonyms, corpus, q)

    topo = topological_expansion(graph, q, c, synonyms, config)
    sq = combine(qo, ql, topo.query, config.weights)
    return Expansion(
        query=sq,
        q=q,
        c=c,
        contextless=contextless,
        synonyms=synonyms,
        lexical_checks=checks,
        context_synonym_count=synonym_count(position_options(graph, c)),
        topology=topo,
    )


# -- diagnostics ---------------------------------------------------------------


def _article(graph: KnowledgeGraph, a: int) -> dict:
    art = graph.articles[a]
    return {"id": a, "title": art.raw_title or art.text}


def _weighted(q: WeightedQuery) -> list[dict]:
    return [{"phrase": phrase_text(p), "weight": w} for w, p in q.ordered()]


def diagnostics(graph: KnowledgeGraph, exp: Expansion) -> dict:
    """JSON-ready record of every intermediate result of an expansion."""
    topo = exp.topology
    kept_paths = {p.articles for p in topo.kept_paths}
    kept_ks = {k.members for k in topo.kept_communities}

    def path_record(p) -> dict:
        return {
            "articles": [_article(graph, a) for a in p.articles],
            "score": f"{p.score.numerator}/{p.score.denominator}",
            "score_value": float(p.score),
            "kept": p.articles in kept_paths,
        }

    return {
        "query_terms": list(exp.q),
        "context_terms": list(exp.c),
        "contextless": exp.contextless,
        "query_synonyms": [phrase_text(p) for p in exp.synonyms],
        "context_synonym_count": exp.context_synonym_count,
        "lexical_filter": exp.lexical_checks,
        "lexical_query": _weighted(exp.query.lexical),
        "relevant": {
            rs.origin: {
                "size": len(rs),
                "matched": rs.matched,
                "truncated": rs.truncated,
                "articles": [_article(graph, a) for a in sorted(rs.members)],
            }
            for rs in (topo.relevant_query, topo.relevant_context)
        },
        "paths": [path_record(p) for p in topo.paths],
        "kept_paths": [path_record(p) for p in topo.kept_paths],
        "communities": [
            {
                "seed": [_article(graph, a) for a in k.seed_path.articles] if k.seed_path else [],
                "members": [_article(graph, a) for a in sorted(k.members)],
                "wcc": wcc_community(graph, k),
                "score": k.score,
                "kept": k.members in kept_ks,
                "hit_iteration_cap": k.hit_iteration_cap,
                "fell_back": k.fell_back,
                "trace": k.trace,
            }
            for k in topo.communities
        ],
        "hierarchies": [
            {
                "depth": h.depth,
                "degenerate": h.degenerate,
                "levels": [list(h.terms)]
                + [[_article(graph, a) for a in level] for level in h.levels],
            }
            for h in topo.hierarchies
        ],
        "topological_query": _weighted(exp.query.topological),
        "rendered": exp.render(),
    }
