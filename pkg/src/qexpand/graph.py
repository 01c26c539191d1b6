"""In-memory article graph with redirect metadata.

Nodes are articles; redirect articles are aliases that never appear in the
link adjacency. Redirect chains are collapsed at load time and every edge
touching a redirect is moved onto the redirect's final target.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Literal, Optional, Sequence, Union

from qexpand.errors import ContractViolation, IntegrityError, ParseError
from qexpand.text import Phrase, as_phrase, tokenize

logger = logging.getLogger(__name__)

Direction = Literal["out", "in", "both"]
Source = Union[IO[bytes], IO[str], Iterable[str], Iterable[bytes]]


@dataclass(frozen=True)
class Article:
    id: int
    title: Phrase
    raw_title: str = ""
    redirect_target: Optional[int] = None

    @property
    def is_redirect(self) -> bool:
        return self.redirect_target is not None

    @property
    def text(self) -> str:
        return " ".join(self.title)


def _iter_lines(source: Source) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise ParseError(f"invalid UTF-8 ({exc.reason})", lineno) from None
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        yield lineno, line


def parse_nodes(source: Source, name: str = "nodes") -> list[tuple[int, str, Optional[int]]]:
    records = []
    for lineno, line in _iter_lines(source):
        cols = line.split("\t")
        if len(cols) != 3:
            raise ParseError(f"expected 3 tab-separated columns, got {len(cols)}", lineno, name)
        raw_id, title, target = cols
        try:
            node_id = int(raw_id)
            target_id = None if target.strip() == "-" else int(target)
        except ValueError:
            raise ParseError(f"non-integer id in {line!r}", lineno, name) from None
        records.append((node_id, title, target_id))
    return records


def parse_edges(source: Source, name: str = "edges") -> list[tuple[int, int]]:
    edges = []
    for lineno, line in _iter_lines(source):
        cols = line.split("\t")
        if len(cols) != 2:
            raise ParseError(f"expected 2 tab-separated columns, got {len(cols)}", lineno, name)
        try:
            edges.append((int(cols[0]), int(cols[1])))
        except ValueError:
            raise ParseError(f"non-integer id in {line!r}", lineno, name) from None
    return edges


def load_graph(nodes_source: Source, edges_source: Source) -> KnowledgeGraph:
    """Read the nodes and edges TSV streams and build a :class:`KnowledgeGraph`."""
    return KnowledgeGraph.from_records(parse_nodes(nodes_source), parse_edges(edges_source))


class KnowledgeGraph:
    """Immutable article graph.

    Article handles are the integer ids of the nodes file. Adjacency is kept
    only between non-redirect articles, as sorted tuples, plus an undirected
    view used for triangle counting.
    """

    def __init__(
        self,
        articles: dict[int, Article],
        out_edges: dict[int, tuple[int, ...]],
        in_edges: dict[int, tuple[int, ...]],
        title_index: dict[Phrase, int],
        redirect_index: dict[int, tuple[int, ...]],
        shadowed_titles: int = 0,
    ):
        self.articles = articles
        self.out_edges = out_edges
        self.in_edges = in_edges
        self.title_index = title_index
        self.redirect_index = redirect_index
        self.shadowed_titles = shadowed_titles
        self.undirected = {
            a: frozenset(out_edges[a]) | frozenset(in_edges[a]) for a in out_edges
        }
        self._term_index: dict[str, tuple[int, ...]] | None = None
        self._bigram_index: dict[Phrase, tuple[int, ...]] | None = None
        self._triangle_cache: dict[int, tuple[int, frozenset[int]]] = {}

    # -- construction -----------------------------------------------------

    @classmethod
    def from_records(
        cls,
        nodes: Iterable[tuple[int, str, Optional[int]]],
        edges: Iterable[tuple[int, int]],
    ) -> KnowledgeGraph:
        raw: dict[int, tuple[str, Optional[int]]] = {}
        for node_id, title, target in nodes:
            if node_id in raw:
                raise IntegrityError(f"duplicate article id {node_id}")
            raw[node_id] = (title, target)

        for node_id, (_, target) in raw.items():
            if target is not None and target not in raw:
                raise IntegrityError(f"redirect {node_id} targets unknown id {target}")

        terminal: dict[int, int] = {}
        for node_id in sorted(raw):
            terminal[node_id] = _resolve_chain(node_id, raw, terminal)

        articles: dict[int, Article] = {}
        for node_id in sorted(raw):
            title, target = raw[node_id]
            final = terminal[node_id]
            articles[node_id] = Article(
                id=node_id,
                title=tokenize(title),
                raw_title=title,
                redirect_target=None if final == node_id else final,
            )

        concepts = sorted(a for a, art in articles.items() if not art.is_redirect)
        out_sets: dict[int, set[int]] = {a: set() for a in concepts}
        in_sets: dict[int, set[int]] = {a: set() for a in concepts}
        for src, dst in edges:
            for end in (src, dst):
                if end not in terminal:
                    raise IntegrityError(f"edge {src}->{dst} references unknown id {end}")
            s, d = terminal[src], terminal[dst]
            if s == d:
                continue
            out_sets[s].add(d)
            in_sets[d].add(s)

        redirects: dict[int, list[int]] = {a: [] for a in concepts}
        for art in articles.values():
            if art.is_redirect:
                redirects[art.redirect_target].append(art.id)

        title_index, shadowed = _build_title_index(articles)
        return cls(
            articles=articles,
            out_edges={a: tuple(sorted(v)) for a, v in out_sets.items()},
            in_edges={a: tuple(sorted(v)) for a, v in in_sets.items()},
            title_index=title_index,
            redirect_index={a: tuple(sorted(v)) for a, v in redirects.items()},
            shadowed_titles=shadowed,
        )

    # -- basic accessors --------------------------------------------------

    def __contains__(self, article_id: object) -> bool:
        return article_id in self.articles

    def __len__(self) -> int:
        return len(self.out_edges)

    @property
    def concept_ids(self) -> list[int]:
        """Sorted ids of all non-redirect articles."""
        return list(self.out_edges)

    @property
    def edge_count(self) -> int:
        return sum(len(v) for v in self.out_edges.values())

    def article(self, article_id: int) -> Article:
        try:
            return self.articles[article_id]
        except KeyError:
            raise ContractViolation(f"unknown article id {article_id}") from None

    def title(self, article_id: int) -> Phrase:
        return self.article(article_id).title

    def _concept(self, article_id: int) -> int:
        art = self.article(article_id)
        if art.is_redirect:
            raise ContractViolation(f"article {article_id} ({art.text!r}) is a redirect")
        return article_id

    # -- lookup ------------------------------------------------------------

    def resolve_title(self, phrase: Phrase | str) -> Optional[Article]:
        """Return the article titled ``phrase``, following a redirect to its target."""
        found = self.title_index.get(as_phrase(phrase))
        if found is None:
            return None
        art = self.articles[found]
        if art.is_redirect:
            return self.articles[art.redirect_target]
        return art

    def redirects_of(self, article_id: int) -> set[Phrase]:
        self._concept(article_id)
        own = self.articles[article_id].title
        return {
            self.articles[r].title
            for r in self.redirect_index[article_id]
            if self.articles[r].title and self.articles[r].title != own
        }

    def neighbors(self, article_id: int, direction: Direction = "out") -> frozenset[int]:
        self._concept(article_id)
        if direction == "out":
            return frozenset(self.out_edges[article_id])
        if direction == "in":
            return frozenset(self.in_edges[article_id])
        if direction == "both":
            return self.undirected[article_id]
        raise ValueError(f"unknown direction {direction!r}")

    # -- title matching indexes (built lazily, read-only afterwards) -------

    @property
    def term_index(self) -> dict[str, tuple[int, ...]]:
        """Term -> non-redirect articles whose own title contains the term."""
        if self._term_index is None:
            index: dict[str, set[int]] = {}
            for a in self.out_edges:
                for term in set(self.articles[a].title):
                    index.setdefault(term, set()).add(a)
            self._term_index = {k: tuple(sorted(v)) for k, v in index.items()}
        return self._term_index

    @property
    def bigram_index(self) -> dict[Phrase, tuple[int, ...]]:
        """Bigram -> concepts whose title or some redirect title contains it."""
        if self._bigram_index is None:
            index: dict[Phrase, set[int]] = {}
            for art in self.articles.values():
                target = art.redirect_target if art.is_redirect else art.id
                t = art.title
                for i in range(len(t) - 1):
                    index.setdefault(t[i : i + 2], set()).add(target)
            self._bigram_index = {k: tuple(sorted(v)) for k, v in index.items()}
        return self._bigram_index

    # -- paths -------------------------------------------------------------

    def shortest_paths(
        self,
        source: int,
        targets: Iterable[int],
        max_hops: int = 4,
        max_paths: Optional[int] = None,
    ) -> list[tuple[int, ...]]:
        """All minimum-length directed paths from ``source`` to the nearest targets.

        The search stops at the first BFS depth where some target other than
        ``source`` is reached; every tied path to every target at that depth is
        returned, sorted by id sequence.
        """
        self._concept(source)
        if max_hops < 1:
            raise ContractViolation("max_hops must be >= 1")
        goal = set(targets)
        goal.discard(source)
        if not goal:
            return []

        preds: dict[int, list[int]] = {source: []}
        frontier = [source]
        for _ in range(max_hops):
            layer: dict[int, list[int]] = {}
            for u in frontier:
                for v in self.out_edges[u]:
                    if v in preds:
                        continue
                    layer.setdefault(v, []).append(u)
            if not layer:
                return []
            preds.update(layer)
            hits = sorted(v for v in layer if v in goal)
            if hits:
                paths: list[tuple[int, ...]] = []
                for hit in hits:
                    for p in _unwind(hit, preds):
                        paths.append(p)
                        if max_paths is not None and len(paths) >= max_paths:
                            logger.warning("path enumeration from %d truncated at %d", source, max_paths)
                            return sorted(paths)
                return sorted(paths)
            frontier = sorted(layer)
        return []

    # -- triangles (undirected view) ---------------------------------------

    def triangle_stats(self, x: int, s: Iterable[int]) -> tuple[int, int]:
        """Triangles of ``x`` with both other corners in ``s``, and members of ``s`` closing one."""
        nx = self.undirected[self._concept(x)]
        inside = nx.intersection(s)
        t = sum(len(self.undirected[y] & inside) for y in inside) // 2
        vt = sum(1 for y in inside if self.undirected[y] & nx)
        return t, vt

    def triangle_profile(self, x: int, cached: bool = True) -> tuple[int, frozenset[int]]:
        """Total triangle count of ``x`` and the set of vertices closing at least one with it."""
        if cached and x in self._triangle_cache:
            return self._triangle_cache[x]
        nx = self.undirected[x]
        closers = frozenset(y for y in nx if self.undirected[y] & nx)
        t = sum(len(self.undirected[y] & nx) for y in closers) // 2
        profile = (t, closers)
        if cached:
            self._triangle_cache[x] = profile
        return profile

    def __getstate__(self) -> dict:
        state = self.__dict__.copy()
        state["_triangle_cache"] = {}
        return state


def _resolve_chain(node_id: int, raw: dict[int, tuple[str, Optional[int]]], done: dict[int, int]) -> int:
    seen: list[int] = []
    cur = node_id
    while True:
        if cur in done:
            final = done[cur]
            break
        target = raw[cur][1]
        if target is None:
            final = cur
            break
        if cur in seen:
            cycle = seen[seen.index(cur) :] + [cur]
            raise IntegrityError("redirect cycle: " + " -> ".join(str(c) for c in cycle))
        seen.append(cur)
        cur = target
    for s in seen:
        done[s] = final
    return final


def _build_title_index(articles: dict[int, Article]) -> tuple[dict[Phrase, int], int]:
    # Colliding normalized titles: a non-redirect beats a redirect, then the lowest id wins.
    index: dict[Phrase, int] = {}
    shadowed = 0
    for art in sorted(articles.values(), key=lambda a: (a.is_redirect, a.id)):
        if not art.title:
            logger.warning("article %d has no indexable title (%r)", art.id, art.raw_title)
            continue
        held = index.get(art.title)
        if held is None:
            index[art.title] = art.id
            continue
        held_target = articles[held].redirect_target or held
        if (art.redirect_target or art.id) != held_target:
            shadowed += 1
            logger.warning(
                "title %r of article %d shadowed by article %d", art.raw_title, art.id, held
            )
    return index, shadowed


def _unwind(node: int, preds: dict[int, list[int]]) -> Iterator[tuple[int, ...]]:
    parents = preds[node]
    if not parents:
        yield (node,)
        return
    for p in sorted(parents):
        for prefix in _unwind(p, preds):
            yield prefix + (node,)


def undirected_edges(graph: KnowledgeGraph) -> Sequence[tuple[int, int]]:
    return sorted((a, b) for a, nb in graph.undirected.items() for b in nb if a < b)
