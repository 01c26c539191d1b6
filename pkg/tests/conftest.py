from __future__ import annotations

import sys
from pathlib import Path

import pytest

from qexpand.corpus import build_index
from qexpand.graph import KnowledgeGraph, load_graph
from qexpand.store import save_index

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"
VW = FIXTURES / "vw"

_acceptance: list[tuple[str, str]] = []


def make_graph(edges, titles=None, redirects=None) -> KnowledgeGraph:
    """Build a graph from (src, dst) pairs; titles default to 'n<id>'."""
    ids = {v for e in edges for v in e}
    if titles:
        ids |= set(titles)
    if redirects:
        ids |= set(redirects)
    titles = titles or {}
    redirects = redirects or {}
    nodes = [(i, titles.get(i, f"n{i}"), redirects.get(i)) for i in sorted(ids)]
    return KnowledgeGraph.from_records(nodes, edges)


@pytest.fixture(scope="session")
def vw_graph():
    with open(VW / "nodes.tsv", "rb") as n, open(VW / "edges.tsv", "rb") as e:
        return load_graph(n, e)


@pytest.fixture(scope="session")
def vw_corpus():
    with open(VW / "corpus.jsonl", "rb") as fh:
        return build_index(fh)


@pytest.fixture(scope="session")
def vw_index(tmp_path_factory, vw_graph, vw_corpus):
    out = tmp_path_factory.mktemp("vw-index")
    save_index(out, vw_graph, vw_corpus)
    return out


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    label = getattr(report, "acceptance_label", None)
    if label:
        _acceptance.append((report.outcome.upper(), label))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker:
        report.acceptance_label = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for outcome, label in _acceptance:
        status = {"PASSED": "PASS", "FAILED": "FAIL", "SKIPPED": "N/A "}.get(outcome, outcome)
        terminalreporter.write_line(f"[{status}] {label}")
