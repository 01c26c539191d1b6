"""Command-line interface.

    qexpand ingest  --nodes N.tsv --edges E.tsv --corpus C.jsonl --out DIR
    qexpand expand  --index DIR --query TEXT [--context TEXT] [--format indri|json]
    qexpand explain --index DIR --query TEXT [--context TEXT] [--figures DIR]
    qexpand batch   --index DIR --queries Q.jsonl --out OUT.jsonl

Exit status: 0 success, 1 pipeline error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from qexpand.corpus import DEFAULT_MAX_N, build_index
from qexpand.errors import IndexFormatError, QExpandError
from qexpand.graph import load_graph
from qexpand.lexical import DEFAULT_SYNONYM_CAP
from qexpand.pipeline import PipelineConfig, diagnostics, expand, load_stopwords
from qexpand.query import WeightVector, query_to_dict, render_json, render_text
from qexpand.store import load_index, save_index
from qexpand.topology import DEFAULT_MAX_HOPS, DEFAULT_WCC_ITERATION_CAP

logger = logging.getLogger("qexpand")

EXIT_OK, EXIT_PIPELINE, EXIT_IO = 0, 1, 2


def _config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--index", required=True, help="directory written by `ingest`")
    p.add_argument("--alpha", type=float, default=0.08, help="weight of the original keywords")
    p.add_argument("--beta", type=float, default=0.05, help="weight of the lexical expansion")
    p.add_argument("--gamma", type=float, default=0.87, help="weight of the topological expansion")
    p.add_argument("--max-hops", type=int, default=DEFAULT_MAX_HOPS)
    p.add_argument("--synonym-cap", type=int, default=DEFAULT_SYNONYM_CAP)
    p.add_argument("--wcc-iteration-cap", type=int, default=DEFAULT_WCC_ITERATION_CAP)
    p.add_argument("--stopwords", help="general stop word file (one term per line)")
    p.add_argument("--visual-stopwords", help="visual stop word file (one term per line)")
    p.add_argument(
        "--hierarchy-containment",
        choices=("formula", "prose"),
        default="formula",
        help="level-2 rule: title terms within the query (formula) or query terms within the title (prose)",
    )


def _query_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--query", required=True)
    p.add_argument("--context", default=None, help="defaults to the query itself")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qexpand", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load graph and corpus into an index directory")
    p.add_argument("--nodes", required=True)
    p.add_argument("--edges", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-ngram", type=int, default=DEFAULT_MAX_N)

    p = sub.add_parser("expand", help="print the expanded structured query")
    _config_args(p)
    _query_args(p)
    p.add_argument("--format", choices=("indri", "json"), default="indri")

    p = sub.add_parser("explain", help="print pipeline diagnostics as JSON")
    _config_args(p)
    _query_args(p)
    p.add_argument("--figures", help="also write report figures (PNG) into this directory")

    p = sub.add_parser("batch", help="expand a JSON-lines file of queries")
    _config_args(p)
    p.add_argument("--queries", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("indri", "json"), default="indri")
    return parser


def config_from_args(args: argparse.Namespace) -> PipelineConfig:
    return PipelineConfig(
        weights=WeightVector(args.alpha, args.beta, args.gamma),
        max_hops=args.max_hops,
        synonym_cap=args.synonym_cap,
        wcc_iteration_cap=args.wcc_iteration_cap,
        stopwords_general=load_stopwords(args.stopwords, "general"),
        stopwords_visual=load_stopwords(args.visual_stopwords, "visual"),
        hierarchy_containment=args.hierarchy_containment,
    )


def cmd_ingest(args: argparse.Namespace) -> int:
    with open(args.nodes, "rb") as nodes, open(args.edges, "rb") as edges:
        graph = load_graph(nodes, edges)
    with open(args.corpus, "rb") as docs:
        corpus = build_index(docs, args.max_ngram)
    manifest = save_index(args.out, graph, corpus)
    print(json.dumps(manifest["counts"], sort_keys=True))
    return EXIT_OK


def _render(sq, fmt: str) -> str:
    return render_json(sq) if fmt == "json" else render_text(sq)


def cmd_expand(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    graph, corpus, _ = load_index(args.index)
    exp = expand(graph, corpus, args.query, args.context, config)
    print(_render(exp.query, args.format))
    return EXIT_OK


def cmd_explain(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    graph, corpus, _ = load_index(args.index)
    exp = expand(graph, corpus, args.query, args.context, config)
    diag = diagnostics(graph, exp)
    print(json.dumps(diag, indent=2, sort_keys=True, ensure_ascii=False))
    if args.figures:
        from qexpand.report import write_figures

        for path in write_figures(diag, args.figures):
            logger.info("wrote %s", path)
    return EXIT_OK


def cmd_batch(args: argparse.Namespace) -> int:
    config = config_from_args(args)
    graph, corpus, _ = load_index(args.index)
    with open(args.queries, encoding="utf-8") as fh:
        lines = fh.readlines()
    failures = 0
    with open(args.out, "w", encoding="utf-8") as out:
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            record: dict = {"line": lineno}
            try:
                item = json.loads(line)
                if not isinstance(item, dict):
                    raise QExpandError("record is not a JSON object")
                if "id" in item:
                    record = {"id": item["id"]}
                query, context = item.get("query"), item.get("context")
                if not isinstance(query, str) or not (context is None or isinstance(context, str)):
                    raise QExpandError("record needs a string 'query' and optional string 'context'")
                exp = expand(graph, corpus, query, context, config)
                if args.format == "json":
                    record["query"] = query_to_dict(exp.query)
                else:
                    record["query"] = render_text(exp.query)
            except (QExpandError, json.JSONDecodeError) as exc:
                failures += 1
                record["error"] = str(exc)
            out.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
    if failures:
        logger.warning("%d of the batch records failed", failures)
    return EXIT_OK


COMMANDS = {"ingest": cmd_ingest, "expand": cmd_expand, "explain": cmd_explain, "batch": cmd_batch}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (OSError, IndexFormatError) as exc:
        print(f"qexpand: {exc}", file=sys.stderr)
        return EXIT_IO
    except (QExpandError, ValueError) as exc:
        print(f"qexpand: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
