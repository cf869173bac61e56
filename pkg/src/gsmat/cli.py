"""Command-line front end: build, query, stats, gen, bench."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import executor, generate, planner, qparser, storage
from .dictionary import TermDictionary
from .errors import GsmatError, ParseError, ResourceLimitError, StoreFormatError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_STORE = 3
EXIT_RESOURCE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse default exits 2; usage errors are 1
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_arg_parser() -> _Parser:
    top = _Parser(prog="gsmat", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[], help="build a store from N-Triples")
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("query", help="run (or explain) a BGP query")
    p.add_argument("--store", required=True, type=Path)
    p.add_argument("--query", required=True, type=Path)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--mode", choices=["sequential", "parallel"], default=None)
    p.add_argument("--budget", type=int, default=executor.DEFAULT_ROW_BUDGET)
    p.add_argument("--explain", action="store_true")
    p.add_argument("--report", action="store_true")

    p = sub.add_parser("stats", help="predicate statistics and degree histogram")
    p.add_argument("--store", required=True, type=Path)
    p.add_argument("--histogram", action="store_true")

    p = sub.add_parser("gen", help="generate synthetic N-Triples")
    p.add_argument("--triples", required=True, type=int)
    p.add_argument("--predicates", required=True, type=int)
    p.add_argument("--zipf", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("bench", help="time queries over repeated runs")
    p.add_argument("--store", required=True, type=Path)
    p.add_argument("--queries", required=True, type=Path)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--workers", type=int, default=8)
    return top


def _cmd_build(args) -> int:
    dictionary = TermDictionary()
    triples: list[storage.EncodedTriple] = []
    with open(args.input, encoding="utf-8") as fh:
        for s, p, o in qparser.read_ntriples(fh):
            triples.append(
                storage.EncodedTriple(
                    dictionary.encode_node(s),
                    dictionary.encode_predicate(p),
                    dictionary.encode_node(o),
                )
            )
    store = storage.build_store(dictionary, triples)
    storage.persist(store, args.out)
    print(
        f"{store.triple_count} triples, {len(store.matrices)} predicates, "
        f"{dictionary.node_count} nodes"
    )
    return EXIT_OK


def _cmd_query(args) -> int:
    store = storage.load(args.store)
    graph = qparser.parse_query(args.query.read_text(encoding="utf-8"))
    query = qparser.bind_constants(graph, store.dictionary)
    plan = planner.make_plan(query, store.stats)

    if args.explain:
        for line in planner.explain_lines(plan):
            print(line)
        return EXIT_OK

    mode = args.mode or ("parallel" if args.workers > 1 else "sequential")
    report = executor.ExecutionReport() if args.report else None
    result = executor.execute(
        query, plan, store,
        mode=mode, worker_count=args.workers, row_budget=args.budget, report=report,
    )
    print("\t".join(result.schema))
    decode = store.dictionary.decode_node
    for row in result.rows:
        print("\t".join(qparser.format_term(decode(v)) for v in row))
    if report is not None:
        for line in report.lines():
            print(line, file=sys.stderr)
    for warning in plan.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return EXIT_OK


def _cmd_stats(args) -> int:
    store = storage.load(args.store)
    for pid in sorted(store.stats):
        st = store.stats[pid]
        print(f"{pid}\t{st.cardinality}\t{st.distinct_subjects}\t{st.distinct_objects}")
    if args.histogram:
        for bound, pct in store.degree_histogram():
            print(f"<={bound}\t{pct:.2f}")
    return EXIT_OK


def _cmd_gen(args) -> int:
    cfg = generate.GenConfig(args.triples, args.predicates, args.zipf, args.seed)
    with open(args.out, "w", encoding="ascii", newline="\n") as fh:
        for line in generate.generate_ntriples(cfg):
            fh.write(line)
            fh.write("\n")
    return EXIT_OK


def _cmd_bench(args) -> int:
    store = storage.load(args.store)
    query_files = sorted(args.queries.glob("*.rq"))
    if not query_files:
        print(f"no .rq files in {args.queries}", file=sys.stderr)
        return EXIT_USAGE
    print("query\tseq_mean_s\tpar_mean_s\tintermediate\tresults")
    for qf in query_files:
        try:
            graph = qparser.parse_query(qf.read_text(encoding="utf-8"))
            query = qparser.bind_constants(graph, store.dictionary)
            plan = planner.make_plan(query, store.stats)
            means = {}
            intermediate = 0
            counts = set()
            for mode, workers in (("sequential", 1), ("parallel", args.workers)):
                elapsed = 0.0
                for _ in range(args.runs):
                    report = executor.ExecutionReport()
                    t0 = time.perf_counter()
                    result = executor.execute(
                        query, plan, store, mode=mode, worker_count=workers, report=report
                    )
                    elapsed += time.perf_counter() - t0
                means[mode] = elapsed / args.runs
                intermediate = report.intermediate_total
                counts.add(len(result.rows))
            assert len(counts) == 1, "sequential/parallel result counts diverge"
            print(
                f"{qf.name}\t{means['sequential']:.6f}\t{means['parallel']:.6f}"
                f"\t{intermediate}\t{counts.pop()}"
            )
        except GsmatError as exc:
            print(f"{qf.name}: {exc}", file=sys.stderr)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_arg_parser().parse_args(argv)
    handler = {
        "build": _cmd_build,
        "query": _cmd_query,
        "stats": _cmd_stats,
        "gen": _cmd_gen,
        "bench": _cmd_bench,
    }[args.command]
    try:
        return handler(args)
    except ParseError as exc:
        print(f"gsmat: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except StoreFormatError as exc:
        print(f"gsmat: store error: {exc}", file=sys.stderr)
        return EXIT_STORE
    except ResourceLimitError as exc:
        print(f"gsmat: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"gsmat: i/o error: {exc}", file=sys.stderr)
        return EXIT_STORE
    except ValueError as exc:
        print(f"gsmat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
