"""Topological expansion: relevant articles, concept paths, communities, hierarchies."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal, Optional, Sequence

from qexpand.errors import ContractViolation
from qexpand.graph import KnowledgeGraph
from qexpand.lexical import WeightedQuery
from qexpand.text import Phrase, bigrams
from qexpand.wcc import Community, wcc_community_exact, wcc_vertex_exact

logger = logging.getLogger(__name__)

DEFAULT_MAX_HOPS = 4
DEFAULT_RELEVANT_CAP = 5000
DEFAULT_WCC_ITERATION_CAP = 200

Containment = Literal["formula", "prose"]


@dataclass(frozen=True)
class ConceptPath:
    articles: tuple[int, ...]
    score: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if len(self.articles) < 2 or self.articles[0] == self.articles[-1]:
            raise ContractViolation(f"invalid concept path {self.articles}")

    def __len__(self) -> int:
        return len(self.articles)


@dataclass(frozen=True)
class RelevantSet:
    origin: Literal["query", "context"]
    members: frozenset[int]
    truncated: bool = False
    matched: int = 0

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Hierarchy:
    """Levels rooted at the query terms.

    ``levels[0]`` holds the article ids of level 2, ``levels[1]`` level 3 and
    so on; level 1 is ``terms``.
    """

    terms: Phrase
    levels: tuple[tuple[int, ...], ...] = ()
    bonus: frozenset[int] = frozenset()

    @property
    def depth(self) -> int:
        return 1 + len(self.levels)

    @property
    def degenerate(self) -> bool:
        return not self.levels

    def level_of(self, article_id: int) -> Optional[int]:
        for i, level in enumerate(self.levels, start=2):
            if article_id in level:
                return i
        return None

    def articles(self) -> list[int]:
        return [a for level in self.levels for a in level]

    def level_weight(self, i: int) -> Fraction:
        L = self.depth
        if not 1 <= i <= L:
            raise ContractViolation(f"level {i} outside hierarchy of depth {L}")
        if i == 1 or (L == 2 and i == 2):
            return Fraction(1)
        return Fraction(L - i, L - 1)


# -- scoring helpers -----------------------------------------------------------


def term_overlap(a: Phrase, b: Phrase) -> int:
    """Number of distinct terms shared by two phrases."""
    return len(set(a) & set(b))


def _title_score(graph: KnowledgeGraph, article_id: int, q: Phrase, c: Phrase) -> int:
    title = graph.articles[article_id].title
    return term_overlap(title, q) + term_overlap(title, c)


def score_path(graph: KnowledgeGraph, articles: Sequence[int], q: Phrase, c: Phrase) -> Fraction:
    """Mean per-article overlap of titles with query and context."""
    return Fraction(sum(_title_score(graph, a, q, c) for a in articles), len(articles))


def score_community(graph: KnowledgeGraph, k: Community, q: Phrase, c: Phrase) -> int:
    return sum(_title_score(graph, a, q, c) for a in k.members)


# -- relevant article selection ------------------------------------------------


def select_relevant(
    graph: KnowledgeGraph,
    phrases: Iterable[Phrase],
    origin: Literal["query", "context"] = "query",
    cap: int = DEFAULT_RELEVANT_CAP,
) -> RelevantSet:
    """Articles matched by any bigram (title or redirect title) or unigram (title) of the phrases."""
    grams: set[Phrase] = set()
    terms: set[str] = set()
    for p in phrases:
        grams.update(bigrams(p))
        terms.update(p)
    return _select(graph, grams, terms, origin, cap)


def select_relevant_options(
    graph: KnowledgeGraph,
    options: Sequence[Sequence[str]],
    origin: Literal["query", "context"] = "context",
    cap: int = DEFAULT_RELEVANT_CAP,
) -> RelevantSet:
    """Same result as :func:`select_relevant` over every combination of ``options``.

    The bigrams of all combinations are exactly the pairs drawn from adjacent
    positions, so the combinations never need to be enumerated.
    """
    grams = {(x, y) for left, right in zip(options, options[1:]) for x in left for y in right}
    terms = {t for opts in options for t in opts}
    return _select(graph, grams, terms, origin, cap)


def _select(
    graph: KnowledgeGraph,
    grams: set[Phrase],
    terms: set[str],
    origin: Literal["query", "context"],
    cap: int,
) -> RelevantSet:
    by_bigram: set[int] = set()
    for g in grams:
        by_bigram.update(graph.bigram_index.get(g, ()))
    by_term: set[int] = set()
    for t in terms:
        by_term.update(graph.term_index.get(t, ()))
    found = by_bigram | by_term
    truncated = len(found) > cap
    if truncated:
        # Bigram hits are the more specific evidence and are kept first.
        ranked = sorted(found, key=lambda a: (a not in by_bigram, a))
        logger.info("%s relevant set truncated from %d to %d", origin, len(found), cap)
        kept = frozenset(ranked[:cap])
    else:
        kept = frozenset(found)
    return RelevantSet(origin=origin, members=kept, truncated=truncated, matched=len(found))


# -- paths ---------------------------------------------------------------------


def compute_paths(
    graph: KnowledgeGraph,
    rq: RelevantSet,
    rc: RelevantSet,
    max_hops: int = DEFAULT_MAX_HOPS,
    q: Phrase = (),
    c: Phrase = (),
) -> list[ConceptPath]:
    """Shortest directed paths from each query-side article to the nearest context-side ones."""
    paths = []
    for source in sorted(rq.members):
        for p in graph.shortest_paths(source, rc.members, max_hops):
            paths.append(ConceptPath(p, score_path(graph, p, q, c)))
    return paths


def top_paths(paths: Iterable[ConceptPath]) -> list[ConceptPath]:
    paths = list(paths)
    if not paths:
        return []
    best = max(p.score for p in paths)
    return sorted((p for p in paths if p.score == best), key=lambda p: p.articles)


# -- community search ----------------------------------------------------------


def _candidates(graph: KnowledgeGraph, members: set[int]) -> list[int]:
    # A vertex that closes no triangle with two members cannot raise the
    # summed WCC, so only such vertices are evaluated.
    und = graph.undirected
    found = set()
    for y in members:
        ny = und[y]
        for cand in ny:
            if cand in members or cand in found:
                continue
            if not und[cand].isdisjoint(ny & members):
                found.add(cand)
    return sorted(found)


def grow_community(
    graph: KnowledgeGraph,
    path: ConceptPath,
    iteration_cap: int = DEFAULT_WCC_ITERATION_CAP,
) -> Community:
    """Grow a community around a path by average-WCC maximization.

    Each outer round greedily adds the neighbor that most increases the
    summed WCC (lowest id on ties) until none does, then sweeps out members
    whose WCC is below a quarter of the community average. Rounds repeat
    until the community WCC stops changing or ``iteration_cap`` is reached.
    """
    seed = frozenset(path.articles)
    members = set(seed)
    trace: list[dict] = []
    hit_cap = True
    fell_back = False

    for outer in range(1, iteration_cap + 1):
        current = wcc_community_exact(graph, members)

        while True:
            best_obj = len(members) * wcc_community_exact(graph, members)
            best = None
            for cand in _candidates(graph, members):
                obj = (len(members) + 1) * wcc_community_exact(graph, members | {cand})
                if obj > best_obj:
                    best_obj, best = obj, cand
            if best is None:
                break
            members.add(best)
            trace.append(
                {
                    "round": outer,
                    "action": "add",
                    "article": best,
                    "objective": float(best_obj),
                    "wcc": float(best_obj / len(members)),
                }
            )

        while members:
            threshold = wcc_community_exact(graph, members) / 4
            modified = False
            for a in sorted(members):
                value = wcc_vertex_exact(graph, a, members)
                if value < threshold:
                    members.discard(a)
                    modified = True
                    trace.append(
                        {
                            "round": outer,
                            "action": "remove",
                            "article": a,
                            "vertex_wcc": float(value),
                            "threshold": float(threshold),
                        }
                    )
            if not modified:
                break

        if not members:
            logger.warning("community around %s emptied; falling back to the seed path", path.articles)
            members = set(seed)
            fell_back = True
            hit_cap = False
            break
        if wcc_community_exact(graph, members) == current:
            hit_cap = False
            break

    if hit_cap:
        logger.warning("community growth around %s hit the %d-round cap", path.articles, iteration_cap)
    return Community(
        members=frozenset(members),
        seed_path=path,
        trace=trace,
        hit_iteration_cap=hit_cap,
        fell_back=fell_back,
    )


def top_communities(communities: Iterable[Community]) -> list[Community]:
    ks = list(communities)
    if not ks:
        return []
    if any(k.score is None for k in ks):
        raise ContractViolation("communities must be scored before ranking")
    best = max(k.score for k in ks)
    return sorted((k for k in ks if k.score == best), key=lambda k: sorted(k.members))


# -- hierarchies and the topological query ------------------------------------


def build_hierarchy(
    graph: KnowledgeGraph,
    k: Community,
    q: Phrase,
    containment: Containment = "formula",
) -> Hierarchy:
    """Place community members in levels below the query terms.

    Level 2 holds members whose title terms all occur in ``q`` (``formula``)
    or whose title contains every term of ``q`` (``prose``). Each further
    level holds the unplaced members linked from the previous level.
    """
    qset = set(q)
    members = k.members

    def fits(title: Phrase) -> bool:
        if not title:
            return False
        if containment == "formula":
            return set(title) <= qset
        if containment == "prose":
            return qset <= set(title)
        raise ValueError(f"unknown containment mode {containment!r}")

    frontier = sorted(a for a in members if fits(graph.articles[a].title))
    levels: list[tuple[int, ...]] = []
    placed: set[int] = set()
    while frontier:
        levels.append(tuple(frontier))
        placed.update(frontier)
        frontier = sorted(
            {v for u in frontier for v in graph.out_edges[u] if v in members and v not in placed}
        )
    bonus = frozenset(
        a for a in placed if len(graph.articles[a].title) == 1 and graph.articles[a].title[0] in qset
    )
    return Hierarchy(terms=tuple(q), levels=tuple(levels), bonus=bonus)


def article_weight(article_id: int, h: Hierarchy) -> Fraction:
    """Weight of a placed article: (L - i) / (L - 1), with 1 for a two-level hierarchy.

    An article titled exactly like a query term also carries the term's level-1
    weight; the sum is capped at 1.
    """
    i = h.level_of(article_id)
    if i is None:
        raise ContractViolation(f"article {article_id} is not placed in the hierarchy")
    w = h.level_weight(i)
    if article_id in h.bonus:
        w = min(Fraction(1), h.level_weight(1) + w)
    return w


def article_weights(hierarchies: Sequence[Hierarchy]) -> dict[int, Fraction]:
    """Mean weight of every placed article across ``hierarchies`` (0 where absent)."""
    if not hierarchies:
        raise ContractViolation("at least one hierarchy is required")
    totals: dict[int, Fraction] = {}
    for h in hierarchies:
        for a in h.articles():
            totals[a] = totals.get(a, Fraction(0)) + article_weight(a, h)
    n = len(hierarchies)
    return {a: w / n for a, w in sorted(totals.items())}


def build_topological_query(hierarchies: Sequence[Hierarchy], graph: KnowledgeGraph) -> WeightedQuery:
    """Article titles and their redirect titles, weighted by mean hierarchy weight."""
    entries: dict[Phrase, float] = {}
    for a, w in article_weights(hierarchies).items():
        if w <= 0:
            continue
        weight = float(w)
        phrases = [graph.articles[a].title] + sorted(graph.redirects_of(a))
        for p in phrases:
            if p and weight > entries.get(p, 0.0):
                entries[p] = weight
    return WeightedQuery(entries)


@dataclass
class TopologicalResult:
    query: WeightedQuery
    relevant_query: RelevantSet
    relevant_context: RelevantSet
    paths: list[ConceptPath] = field(default_factory=list)
    kept_paths: list[ConceptPath] = field(default_factory=list)
    communities: list[Community] = field(default_factory=list)
    kept_communities: list[Community] = field(default_factory=list)
    hierarchies: list[Hierarchy] = field(default_factory=list)
