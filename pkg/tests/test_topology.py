from fractions import Fraction
from itertools import combinations

import pytest

import oracles
from conftest import make_graph
from qexpand import topology
from qexpand.errors import ContractViolation
from qexpand.text import tokenize
from qexpand.topology import (
    ConceptPath,
    Hierarchy,
    RelevantSet,
    article_weight,
    build_hierarchy,
    build_topological_query,
    compute_paths,
    grow_community,
    score_community,
    score_path,
    select_relevant,
    top_communities,
    top_paths,
    term_overlap,
)
from qexpand.wcc import Community

LETTERS = "abcdefghijk"
FIG2_EDGES = [("a", "b"), ("c", "d"), ("d", "e"), ("d", "f"), ("g", "h"), ("g", "i"), ("j", "k")]
FIG2_RQ = set("acdgh")
FIG2_RC = set("befhgijk")


def fig2():
    ids = {ch: i for i, ch in enumerate(LETTERS, start=1)}
    g = make_graph([(ids[a], ids[b]) for a, b in FIG2_EDGES], titles={i: ch for ch, i in ids.items()})
    rq = RelevantSet("query", frozenset(ids[x] for x in FIG2_RQ))
    rc = RelevantSet("context", frozenset(ids[x] for x in FIG2_RC))
    return g, rq, rc, {i: ch for ch, i in ids.items()}


def as_letters(paths, names):
    return {"".join(names[a] for a in p.articles) for p in paths}


def test_fig2_path_table():
    g, rq, rc, names = fig2()
    paths = compute_paths(g, rq, rc, 4)
    assert as_letters(paths, names) == {"ab", "cde", "cdf", "de", "df", "gh", "gi"}
    assert "jk" not in as_letters(paths, names)


def test_overlap_node_without_route_has_no_path():
    g, rq, rc, names = fig2()
    # h is in both sets and has no outgoing links
    assert not any(names[p.articles[0]] == "h" for p in compute_paths(g, rq, rc, 4))


def test_disconnected_sets():
    g = make_graph([(1, 2), (3, 4)])
    assert compute_paths(g, RelevantSet("query", frozenset({1})), RelevantSet("context", frozenset({4}))) == []


def test_paths_are_directed_query_to_context():
    g, rq, rc, _ = fig2()
    for p in compute_paths(g, rq, rc, 4):
        assert p.articles[0] in rq.members
        assert p.articles[-1] in rc.members
        assert p.articles[0] != p.articles[-1]
        assert all(b in g.out_edges[a] for a, b in zip(p.articles, p.articles[1:]))


def test_paths_minimal_against_oracle():
    g, rq, rc, _ = fig2()
    edges = [(a, b) for a in g.out_edges for b in g.out_edges[a]]
    for s in rq.members:
        got = [p.articles for p in compute_paths(g, RelevantSet("query", frozenset({s})), rc, 4)]
        assert got == oracles.shortest_paths(s, rc.members, edges, 4)


def test_term_overlap():
    assert term_overlap(tokenize("volkswagen beetle"), tokenize("volkswagen beetles in any color")) == 1
    p = ("a", "b", "a")
    assert term_overlap(p, p) == 2
    assert term_overlap(("x",), ("y",)) == 0


def test_select_relevant_bigrams_and_unigrams():
    g = make_graph([], titles={1: "volkswagen beetle", 2: "beetle (insect)", 3: "volkswagen golf"})
    rs = select_relevant(g, [tokenize("volkswagen beetles")])
    assert rs.members == {1, 3}
    assert not rs.truncated


def test_select_relevant_redirect_bigram_maps_to_target():
    g = make_graph([], titles={1: "type 1 car", 2: "colored volkswagen", 3: "other"}, redirects={2: 3})
    rs = select_relevant(g, [tokenize("colored volkswagen beetles")])
    assert rs.members == {3}


def test_select_relevant_single_term():
    g = make_graph([], titles={1: "golf", 2: "golf course", 3: "tennis"})
    assert select_relevant(g, [("golf",)]).members == {1, 2}


def test_select_relevant_truncation_is_recorded():
    g = make_graph([], titles={i: f"car model{i}" for i in range(1, 11)})
    rs = select_relevant(g, [("car",)], cap=4)
    assert rs.truncated and rs.matched == 10
    assert rs.members == {1, 2, 3, 4}


def test_select_relevant_options_equals_enumeration(vw_graph):
    from qexpand.lexical import phrase_synonyms, position_options

    q = tokenize("volkswagen beetles example")
    a = select_relevant(vw_graph, phrase_synonyms(vw_graph, q), "context")
    b = topology.select_relevant_options(vw_graph, position_options(vw_graph, q), "context")
    assert a == b


def test_score_path():
    g = make_graph([(1, 2)], titles={1: "volkswagen car", 2: "red bus"})
    q, c = ("volkswagen", "beetles"), ("red", "car")
    assert score_path(g, (1, 2), q, c) == Fraction(3, 2)
    assert score_path(g, (1, 2), ("x",), ("y",)) == 0


def _p(score, ids):
    return ConceptPath(ids, Fraction(score))


def test_top_paths():
    paths = [_p(Fraction(3, 2), (i, 100 + i)) for i in range(9, 0, -1)]
    paths += [_p(1, (200 + i, 400 + i)) for i in range(173)]
    top = top_paths(paths)
    assert len(paths) == 182 and len(top) == 9
    assert [p.articles for p in top] == sorted(p.articles for p in top)
    assert top_paths([paths[0]]) == [paths[0]]
    assert top_paths([]) == []
    same = [_p(1, (1, 2)), _p(1, (0, 5))]
    assert [p.articles for p in top_paths(same)] == [(0, 5), (1, 2)]


def test_concept_path_validation():
    with pytest.raises(ContractViolation):
        ConceptPath((1,))
    with pytest.raises(ContractViolation):
        ConceptPath((1, 2, 1))


# -- community growth ---------------------------------------------------------

ATTACHED = list(combinations([1, 2, 3, 4], 2)) + [(5, 1), (5, 2), (6, 5), (7, 6), (8, 4)]


def test_grow_absorbs_clique():
    g = make_graph(ATTACHED)
    k = grow_community(g, ConceptPath((5, 1)))
    # frozen from oracles.grow_reference on the same fixture
    assert k.members == {1, 2, 3, 4, 5}
    objectives = [e["objective"] for e in k.trace if e["action"] == "add"]
    assert objectives == [1.5, pytest.approx(23 / 12), 4.0]
    assert not k.hit_iteration_cap and not k.fell_back


def test_grow_matches_reference_on_attached_fixture():
    g = make_graph(ATTACHED)
    und = oracles.undirected(ATTACHED)
    for seed in [(5, 1), (6, 5), (1, 2), (8, 4), (7, 6)]:
        ref, _ = oracles.grow_reference(set(seed), range(1, 9), und)
        assert grow_community(g, ConceptPath(seed)).members == ref


def test_path_sharing_one_clique_node_cannot_grow():
    # Every single addition keeps the summed WCC at 0, so the strict rule rejects all.
    edges = list(combinations([1, 2, 3, 4], 2)) + [(5, 1)]
    k = grow_community(make_graph(edges), ConceptPath((5, 1)))
    assert k.members == {1, 5}


def test_grow_without_triangles():
    g = make_graph([(1, 2), (2, 3), (3, 4), (4, 5)])
    k = grow_community(g, ConceptPath((2, 3)))
    assert k.members == {2, 3}
    assert k.trace == []


def test_grow_isolated_pair():
    g = make_graph([(1, 2)])
    assert grow_community(g, ConceptPath((1, 2))).members == {1, 2}


def test_candidate_pruning_does_not_change_result(monkeypatch):
    import random

    rng = random.Random(21)
    cases = []
    for _ in range(40):
        n = rng.randint(4, 14)
        edges = [(a, b) for a, b in combinations(range(n), 2) if rng.random() < 0.35]
        if not edges:
            continue
        a, b = rng.choice(edges)
        cases.append((make_graph(edges, titles={i: f"n{i}" for i in range(n)}), (a, b)))
    pruned = [grow_community(g, ConceptPath(seed)).members for g, seed in cases]

    def naive(graph, members):
        return sorted({v for m in members for v in graph.undirected[m]} - set(members))

    monkeypatch.setattr(topology, "_candidates", naive)
    assert pruned == [grow_community(g, ConceptPath(seed)).members for g, seed in cases]


def test_iteration_cap_flag(monkeypatch):
    g = make_graph(ATTACHED)
    calls = iter(range(10**6))
    real = topology.wcc_community_exact

    def drifting(graph, members, cached=True):
        # perturb only the round-start snapshot so rounds never converge
        return real(graph, members, cached) + Fraction(next(calls), 10**9)

    monkeypatch.setattr(topology, "wcc_community_exact", drifting)
    k = grow_community(g, ConceptPath((5, 1)), iteration_cap=3)
    assert k.hit_iteration_cap
    assert k.members


def test_score_community():
    g = make_graph([], titles={1: "volkswagen red", 2: "volkswagen", 3: "bus"})
    q, c = ("volkswagen",), ("red",)
    assert score_community(g, Community({1, 2, 3}), q, c) == 3
    assert score_community(g, Community({3}), q, c) == 0
    g = make_graph([], titles={1: "a b"})
    assert score_community(g, Community({1}), ("a", "b"), ("a",)) == 3


def test_top_communities():
    ks = [Community({1}, score=5), Community({2}, score=2), Community({0}, score=5)]
    assert [sorted(k.members) for k in top_communities(ks)] == [[0], [1]]
    assert top_communities([ks[1]]) == [ks[1]]
    assert top_communities([]) == []


# -- hierarchy -------------------------------------------------------------------


def test_hierarchy_level_two_formula():
    g = make_graph([(1, 2)], titles={1: "volkswagen", 2: "volkswagen beetle"})
    h = build_hierarchy(g, Community({1, 2}), ("volkswagen", "beetles"))
    assert h.levels[0] == (1,)
    assert h.level_of(2) == 3


def test_hierarchy_prose_mode():
    g = make_graph([(2, 1)], titles={1: "volkswagen", 2: "volkswagen beetles club"})
    h = build_hierarchy(g, Community({1, 2}), ("volkswagen", "beetles"), containment="prose")
    assert h.levels[0] == (2,)
    assert h.level_of(1) == 3


def test_hierarchy_chain_levels():
    g = make_graph([(1, 2), (2, 3), (3, 1), (1, 4)], titles={1: "beetle", 2: "x", 3: "y", 4: "z"})
    h = build_hierarchy(g, Community({1, 2, 3}), ("beetle",))
    assert h.levels == ((1,), (2,), (3,))
    assert h.depth == 4
    # 4 is linked but outside the community
    assert h.level_of(4) is None


def test_hierarchy_unreachable_members_removed():
    g = make_graph([(2, 1)], titles={1: "beetle", 2: "x"})
    h = build_hierarchy(g, Community({1, 2}), ("beetle",))
    assert h.articles() == [1]


def test_degenerate_hierarchy():
    g = make_graph([(1, 2)], titles={1: "a", 2: "b"})
    h = build_hierarchy(g, Community({1, 2}), ("z",))
    assert h.degenerate and h.depth == 1
    assert h.level_weight(1) == 1
    assert len(build_topological_query([h], g)) == 0


def test_article_weights():
    h = Hierarchy(("q",), ((1,), (2,), (3,)))
    assert article_weight(1, h) == Fraction(2, 3)
    assert article_weight(3, h) == 0
    h3 = Hierarchy(("q",), ((1,), (2,)))
    assert article_weight(1, h3) == Fraction(1, 2)
    h2 = Hierarchy(("q",), ((1, 2),))
    assert article_weight(1, h2) == 1
    with pytest.raises(ContractViolation):
        article_weight(9, h)


def test_term_titled_article_gets_level_one_weight():
    g = make_graph([(1, 2), (2, 3)], titles={1: "volkswagen", 2: "x", 3: "y"})
    h = build_hierarchy(g, Community({1, 2, 3}), ("volkswagen", "beetles"))
    assert h.bonus == {1}
    # level-2 weight would be 2/3; the term weight lifts it to the cap
    assert article_weight(1, h) == 1


def test_topological_query_single_hierarchy_with_redirect():
    g = make_graph([], titles={1: "beetle", 2: "beetles"}, redirects={2: 1})
    h = Hierarchy(("beetle", "car"), ((1,),))
    qt = build_topological_query([h], g)
    assert qt.entries == {("beetle",): 1.0, ("beetles",): 1.0}


def test_topological_query_averages_over_hierarchies():
    g = make_graph([], titles={1: "a", 2: "b"})
    h1 = Hierarchy(("a", "b"), ((1, 2),))
    h2 = Hierarchy(("a", "b"), ((2,),))
    qt = build_topological_query([h1, h2], g)
    assert qt.entries == {("a",): 0.5, ("b",): 1.0}
    with pytest.raises(ContractViolation):
        build_topological_query([], g)
