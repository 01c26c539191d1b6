"""Redirect-based synonyms and the lexical expansion query."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product
from math import prod
from typing import Iterable, Iterator, Mapping

from qexpand.corpus import CorpusIndex
from qexpand.errors import ContractViolation, ExpansionOverflow
from qexpand.graph import KnowledgeGraph
from qexpand.text import Phrase, phrase_text

logger = logging.getLogger(__name__)

DEFAULT_SYNONYM_CAP = 1024


@dataclass(frozen=True)
class WeightedQuery:
    """A set of <weight, phrase> pairs with unique phrases."""

    entries: Mapping[Phrase, float] = field(default_factory=dict)

    @classmethod
    def uniform(cls, phrases: Iterable[Phrase]) -> WeightedQuery:
        unique = sorted(set(phrases))
        if not unique:
            return cls({})
        w = 1.0 / len(unique)
        return cls({p: w for p in unique})

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __contains__(self, phrase: object) -> bool:
        return phrase in self.entries

    def __iter__(self) -> Iterator[tuple[float, Phrase]]:
        return iter(self.ordered())

    def weight(self, phrase: Phrase) -> float:
        return self.entries[phrase]

    def ordered(self) -> list[tuple[float, Phrase]]:
        """Entries by descending weight, ties broken by phrase text."""
        return sorted(
            ((w, p) for p, w in self.entries.items()),
            key=lambda e: (-e[0], phrase_text(e[1])),
        )

    def phrases(self) -> list[Phrase]:
        return [p for _, p in self.ordered()]


def term_synonyms(graph: KnowledgeGraph, term: str) -> frozenset[str]:
    """Single-term titles that name the same concept as ``term``.

    The article titled ``term`` is looked up (through a redirect if needed);
    its own title and its redirect titles count, provided they are one term.
    """
    art = graph.resolve_title((term,))
    if art is None:
        return frozenset()
    names = {art.title} | graph.redirects_of(art.id)
    return frozenset(n[0] for n in names if len(n) == 1 and n[0] != term)


def position_options(graph: KnowledgeGraph, phrase: Phrase) -> list[tuple[str, ...]]:
    """Per-position alternatives: the original term first, then its synonyms sorted."""
    return [(t,) + tuple(sorted(term_synonyms(graph, t))) for t in phrase]


def synonym_count(options: list[tuple[str, ...]]) -> int:
    return prod(len(o) for o in options)


def phrase_synonyms(
    graph: KnowledgeGraph, phrase: Phrase, cap: int = DEFAULT_SYNONYM_CAP
) -> set[Phrase]:
    """Every order-preserving combination of per-term synonyms, the phrase itself included."""
    if not phrase:
        raise ContractViolation("phrase must be non-empty")
    options = position_options(graph, phrase)
    size = synonym_count(options)
    if size > cap:
        raise ExpansionOverflow(size, cap)
    return set(product(*options))


def build_lexical_query(
    synonyms: Iterable[Phrase], index: CorpusIndex, original: Phrase
) -> WeightedQuery:
    survivors = []
    for p in synonyms:
        if p == original:
            continue
        if len(p) > index.max_n:
            logger.info("synonym %r longer than indexed n-grams; not verifiable", phrase_text(p))
            continue
        if index.phrase_exists(p):
            survivors.append(p)
    return WeightedQuery.uniform(survivors)
