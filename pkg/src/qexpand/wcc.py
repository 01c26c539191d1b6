"""Weighted Community Clustering on the undirected view of the article graph.

For a vertex ``x`` in community ``K``::

    WCC(x, K) = t(x, K) / t(x, V) * vt(x, V) / (|K \\ {x}| + vt(x, V \\ K))

where ``t`` counts triangles of ``x`` whose other two corners lie in the given
set and ``vt`` counts vertices of the set that close at least one triangle
with ``x``. The value is 0 when ``x`` has no triangles at all. Community WCC
is the mean over members.

Exact rational arithmetic is used internally so that the growth procedure can
compare objectives without rounding ties.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, AbstractSet, Iterable, Optional, Union

from qexpand.errors import ContractViolation
from qexpand.graph import KnowledgeGraph

if TYPE_CHECKING:
    from qexpand.topology import ConceptPath


@dataclass
class Community:
    members: frozenset[int]
    seed_path: Optional["ConceptPath"] = None
    score: Optional[int] = None
    trace: list[dict] = field(default_factory=list)
    hit_iteration_cap: bool = False
    fell_back: bool = False

    def __post_init__(self) -> None:
        self.members = frozenset(self.members)
        if not self.members:
            raise ContractViolation("community must be non-empty")

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, article_id: object) -> bool:
        return article_id in self.members


Members = Union[Community, AbstractSet[int], Iterable[int]]


def _members(k: Members) -> frozenset[int]:
    if isinstance(k, Community):
        return k.members
    return frozenset(k)


def wcc_vertex_exact(
    graph: KnowledgeGraph, x: int, k: Members, cached: bool = True
) -> Fraction:
    members = _members(k)
    if x not in members:
        raise ContractViolation(f"article {x} is not a community member")
    t_all, closers = graph.triangle_profile(x, cached=cached)
    if t_all == 0:
        return Fraction(0)
    others = members - {x}
    t_in, _ = graph.triangle_stats(x, others)
    if t_in == 0:
        return Fraction(0)
    vt_all = len(closers)
    vt_out = len(closers - members)
    return Fraction(t_in * vt_all, t_all * (len(others) + vt_out))


def wcc_vertex(graph: KnowledgeGraph, x: int, k: Members) -> float:
    """How well vertex ``x`` fits community ``k``, in [0, 1]."""
    return float(wcc_vertex_exact(graph, x, k))


def wcc_community_exact(graph: KnowledgeGraph, k: Members, cached: bool = True) -> Fraction:
    members = _members(k)
    if not members:
        raise ContractViolation("community must be non-empty")
    total = sum((wcc_vertex_exact(graph, x, members, cached) for x in members), Fraction(0))
    return total / len(members)


def wcc_community(graph: KnowledgeGraph, k: Members) -> float:
    """Mean vertex WCC over the community members."""
    return float(wcc_community_exact(graph, k))
