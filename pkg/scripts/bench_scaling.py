#!/usr/bin/env python3
"""Small scaling experiment: build time, store size, and query latency as
the synthetic dataset grows.

Usage: python3 scripts/bench_scaling.py [--sizes 10000,50000,200000]
"""

import argparse
import subprocess
import sys
import tempfile
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from gsmat import executor, planner, qparser, storage  # noqa: E402

QUERIES = {
    "path2": "SELECT * WHERE { ?x <p3> ?y . ?y <p4> ?z . }",
    "star3": "SELECT * WHERE { ?x <p5> ?a . ?x <p6> ?b . ?x <p7> ?c . }",
}


def run(size: int, workdir: Path) -> None:
    data = workdir / f"{size}.nt"
    store_dir = workdir / f"store_{size}"
    subprocess.run(
        [sys.executable, "-m", "gsmat.cli", "gen", "--triples", str(size),
         "--predicates", "20", "--zipf", "1.0", "--seed", "1", "--out", str(data)],
        check=True,
    )
    t0 = time.perf_counter()
    subprocess.run(
        [sys.executable, "-m", "gsmat.cli", "build", "--input", str(data),
         "--out", str(store_dir)],
        check=True, capture_output=True,
    )
    build_s = time.perf_counter() - t0
    disk = sum(f.stat().st_size for f in store_dir.iterdir())

    store = storage.load(store_dir)
    for name, text in QUERIES.items():
        graph = qparser.parse_query(text)
        encoded = qparser.bind_constants(graph, store.dictionary)
        plan = planner.make_plan(encoded, store.stats)
        timings = {}
        for mode, workers in (("sequential", 1), ("parallel", 8)):
            t0 = time.perf_counter()
            result = executor.execute(
                encoded, plan, store, mode=mode, worker_count=workers
            )
            timings[mode] = time.perf_counter() - t0
        print(
            f"{size}\t{name}\t{build_s:.2f}\t{disk}\t{len(result.rows)}"
            f"\t{timings['sequential']:.4f}\t{timings['parallel']:.4f}"
        )


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="10000,50000,200000")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    print("triples\tquery\tbuild_s\tdisk_bytes\tresults\tseq_s\tpar_s")
    with tempfile.TemporaryDirectory() as tmp:
        for size in sizes:
            run(size, Path(tmp))


if __name__ == "__main__":
    main()
