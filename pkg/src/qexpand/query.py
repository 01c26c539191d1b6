"""Combination of the partial queries and their rendering.

Text form (Indri operators)::

    query    := '#weight(' branch (' ' branch)* ')'
    branch   := FLOAT ' ' node
    node     := '#combine(' term (' ' term)* ')'
              | '#weight(' FLOAT ' ' phraseop (' ' FLOAT ' ' phraseop)* ')'
    phraseop := '#od1(' terms ')' | '#uw' INT '(' terms ')'

Branches appear in the order original, lexical, topological, context; empty
or zero-weight branches are left out and the remaining branch weights are
rescaled to sum to 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

from qexpand.errors import DegenerateQueryError, EmptyQueryError, QExpandError
from qexpand.lexical import WeightedQuery
from qexpand.text import Phrase, phrase_text

JSON_FORMAT = "qexpand.structured-query/1"
WINDOW_PER_TERM = 4


@dataclass(frozen=True)
class WeightVector:
    alpha: float = 0.08
    beta: float = 0.05
    gamma: float = 0.87

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be a finite non-negative number, got {v}")
        if self.alpha + self.beta + self.gamma <= 0:
            raise ValueError("at least one of alpha, beta, gamma must be positive")


@dataclass(frozen=True)
class StructuredQuery:
    weights: WeightVector
    original: WeightedQuery
    lexical: WeightedQuery = WeightedQuery()
    topological: WeightedQuery = WeightedQuery()
    context: Optional[WeightedQuery] = None
    context_weight: float = 0.0

    def branches(self) -> list[tuple[str, float, WeightedQuery]]:
        """Present branches as (name, renormalized weight, query)."""
        raw = [
            ("original", self.weights.alpha, self.original),
            ("lexical", self.weights.beta, self.lexical),
            ("topological", self.weights.gamma, self.topological),
        ]
        if self.context is not None:
            raw.append(("context", self.context_weight, self.context))
        present = [(n, w, q) for n, w, q in raw if q and w > 0]
        total = sum(w for _, w, _ in present)
        if not present or total <= 0:
            raise DegenerateQueryError()
        return [(n, w / total, q) for n, w, q in present]


def build_original_query(q: Phrase) -> WeightedQuery:
    if not q or not any(t.strip() for t in q):
        raise EmptyQueryError()
    return WeightedQuery({tuple(q): 1.0})


def build_context_query(c: Phrase) -> WeightedQuery:
    """Every distinct context term at equal weight."""
    return WeightedQuery.uniform((t,) for t in c)


def combine(
    qo: WeightedQuery,
    ql: WeightedQuery,
    qt: WeightedQuery,
    w: WeightVector,
    qc: Optional[WeightedQuery] = None,
    context_weight: float = 0.0,
) -> StructuredQuery:
    if not qo:
        raise EmptyQueryError()
    sq = StructuredQuery(w, qo, ql, qt, qc, context_weight)
    sq.branches()  # raises on a degenerate combination
    return sq


def baseline_query(qo: WeightedQuery, qc: WeightedQuery) -> StructuredQuery:
    """Keywords plus bag of context terms at equal branch weight."""
    return combine(qo, WeightedQuery(), WeightedQuery(), WeightVector(1.0, 0.0, 0.0), qc, 1.0)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _node(name: str, q: WeightedQuery) -> str:
    if name == "original":
        terms = [t for _, p in q.ordered() for t in p]
        return f"#combine({' '.join(terms)})"
    parts = []
    for weight, p in q.ordered():
        if name == "topological":
            op = f"#uw{WINDOW_PER_TERM * len(p)}"
        else:
            op = "#od1"
        parts.append(f"{_fmt(weight)} {op}({phrase_text(p)})")
    return f"#weight({' '.join(parts)})"


def render_text(sq: StructuredQuery) -> str:
    branches = [f"{_fmt(w)} {_node(name, q)}" for name, w, q in sq.branches()]
    return f"#weight({' '.join(branches)})"


def _entries(q: Optional[WeightedQuery]) -> Optional[list[dict]]:
    if q is None:
        return None
    return [{"phrase": list(p), "weight": w} for w, p in q.ordered()]


def query_to_dict(sq: StructuredQuery) -> dict:
    return {
        "format": JSON_FORMAT,
        "weights": {
            "alpha": sq.weights.alpha,
            "beta": sq.weights.beta,
            "gamma": sq.weights.gamma,
        },
        "branches": [{"name": n, "weight": w} for n, w, _ in sq.branches()],
        "original": _entries(sq.original),
        "lexical": _entries(sq.lexical),
        "topological": _entries(sq.topological),
        "context": _entries(sq.context),
        "context_weight": sq.context_weight,
    }


def render_json(sq: StructuredQuery, indent: Optional[int] = None) -> str:
    # Python's float repr is the shortest round-tripping form, so parse_json is lossless.
    return json.dumps(query_to_dict(sq), sort_keys=True, indent=indent, ensure_ascii=False)


def _load_entries(items) -> WeightedQuery:
    return WeightedQuery({tuple(e["phrase"]): float(e["weight"]) for e in items})


def parse_json(text: str) -> StructuredQuery:
    try:
        obj = json.loads(text)
        if obj.get("format") != JSON_FORMAT:
            raise QExpandError(f"unsupported query format {obj.get('format')!r}")
        w = obj["weights"]
        ctx = obj.get("context")
        return StructuredQuery(
            weights=WeightVector(w["alpha"], w["beta"], w["gamma"]),
            original=_load_entries(obj["original"]),
            lexical=_load_entries(obj["lexical"]),
            topological=_load_entries(obj["topological"]),
            context=None if ctx is None else _load_entries(ctx),
            context_weight=float(obj.get("context_weight", 0.0)),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise QExpandError(f"malformed structured query JSON: {exc}") from None
