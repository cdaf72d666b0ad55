#!/usr/bin/env python3
"""Build witnesses for a handful of small metric spaces and report timings.

Runs the full pipeline on each bundled fixture (or on graph files passed on
the command line), prints size statistics, and optionally extends every
partial isometry of the input exhaustively as a smoke check.

    python3 scripts/run_fixtures.py
    python3 scripts/run_fixtures.py --extend-all --output-dir /tmp/witnesses
    python3 scripts/run_fixtures.py my_space.json --extend-all
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from eppa import (
    Config,
    build_witness,
    check_map,
    enumerate_partial_automorphisms,
    extend_isometry,
    graph_from_triples,
    witness_stats,
)
from eppa.fileio import dump_json, graph_from_json, load_json, witness_to_json
from eppa.graphs import EdgeLabelledGraph


def bundled_fixtures() -> list[tuple[str, EdgeLabelledGraph]]:
    return [
        ("two-point", graph_from_triples(["a", "b"], [("a", "b", 1)])),
        (
            "triangle-112",
            graph_from_triples(
                ["x", "y", "z"], [("x", "y", 1), ("x", "z", 1), ("y", "z", 2)]
            ),
        ),
        (
            "triangle-123",
            graph_from_triples(
                ["x", "y", "z"], [("x", "y", 1), ("x", "z", 2), ("y", "z", 3)]
            ),
        ),
        (
            "four-point",
            graph_from_triples(
                ["a", "b", "c", "d"],
                [
                    ("a", "b", 1),
                    ("b", "c", 1),
                    ("c", "d", 1),
                    ("a", "d", 1),
                    ("a", "c", 2),
                    ("b", "d", 2),
                ],
            ),
        ),
    ]


def run_one(name: str, g: EdgeLabelledGraph, args: argparse.Namespace) -> None:
    cfg = Config(vertex_cap=args.vertex_cap, coherent=not args.non_coherent)
    t0 = time.perf_counter()
    w = build_witness(g, cfg)
    build_s = time.perf_counter() - t0

    stats = witness_stats(w)
    print(f"== {name}")
    print(f"   input: {len(g)} vertices, spectrum {stats['spectrum']}")
    print(f"   tower: levels {stats['levels']} -> final {stats['final_vertices']} vertices")
    print(f"   build: {build_s:.2f}s")

    if args.extend_all:
        t0 = time.perf_counter()
        count = 0
        for phi in enumerate_partial_automorphisms(g, len(g)):
            theta = extend_isometry(w, phi)
            if not check_map(theta, w.final, w.final, "automorphism"):
                raise SystemExit(f"{name}: extension of {dict(phi.items())} is not an automorphism")
            count += 1
        print(f"   extend: {count} partial isometries in {time.perf_counter() - t0:.2f}s")

    if args.output_dir:
        path = Path(args.output_dir) / f"{name}.witness.json"
        dump_json(str(path), witness_to_json(w))
        print(f"   wrote {path}")


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("graphs", nargs="*", help="graph JSON files; default: bundled fixtures")
    ap.add_argument("--extend-all", action="store_true", help="extend every partial isometry")
    ap.add_argument("--vertex-cap", type=int, default=200_000)
    ap.add_argument("--non-coherent", action="store_true", help="per-map search instead of replay")
    ap.add_argument("--output-dir", help="write witness files here")
    args = ap.parse_args(argv)

    if args.output_dir:
        Path(args.output_dir).mkdir(parents=True, exist_ok=True)

    if args.graphs:
        jobs = [(Path(p).stem, graph_from_json(load_json(p))) for p in args.graphs]
    else:
        jobs = bundled_fixtures()

    for name, g in jobs:
        run_one(name, g, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
