#!/usr/bin/env python3
"""Tamper with a stored witness and measure how often the verifier objects.

Loads a witness file (or builds a small demonstration witness whose
expansion levels carry valuation bits), applies single-site mutations, and
reruns the independent cross-check on every mutant.  A sound verifier
catches every mutation; the exit code is 1 if any slips through.

Mutations:
  * valuation-bit flips: transpose the two vertex copies differing in one
    stored bit, rewriting that level's edge relation only
  * label bumps: add 1 to a single stored edge label (level or final graph)

    python3 scripts/mutation_probe.py --demo
    python3 scripts/mutation_probe.py witness.json --bumps 25 --seed 7
"""

from __future__ import annotations

import argparse
import dataclasses
import random
import sys

from eppa import PartialMap, Witness, build_next_level, cross_check, graph_from_triples, shortest_path_completion
from eppa.fileio import load_json, witness_from_json
from eppa.graphs import EdgeLabelledGraph, induced_subgraph
from eppa.levels import LevelGraph, parse_level_vertex


def demo_witness() -> Witness:
    """One expansion step over a graph with two overlapping non-metric
    triangles; its twelve derived vertices carry twenty valuation bits."""
    core = EdgeLabelledGraph(
        ["p", "q", "r", "s"],
        [("p", "q", 3), ("p", "r", 1), ("q", "r", 1), ("p", "s", 1), ("q", "s", 1)],
    )
    prev = LevelGraph(
        graph=core, level=2, base_embedding=PartialMap({"z": "r"}), projection={}, bad_sets=()
    )
    nxt = build_next_level(prev, ["r"])
    seen = set(nxt.base_embedding.image())
    frontier = list(seen)
    while frontier:
        u = frontier.pop()
        for v in nxt.graph.neighbors(u):
            if v not in seen:
                seen.add(v)
                frontier.append(v)
    component = tuple(sorted(seen))
    final = shortest_path_completion(induced_subgraph(nxt.graph, component))
    return Witness(
        input=graph_from_triples(["z"], []),
        set_assignment=None,
        levels=(prev, nxt),
        component=component,
        final=final,
        final_embedding=PartialMap({"z": nxt.base_embedding["z"]}),
        n=3,
    )


def bit_flip_mutants(w: Witness):
    for idx, lvl in enumerate(w.levels):
        if lvl.level < 3:
            continue  # base-level ids carry no valuation bits
        for vid in lvl.graph.vertices:
            base, bits = parse_level_vertex(vid)
            for pos in range(len(bits)):
                other = base + ";" + bits[:pos] + ("1" if bits[pos] == "0" else "0") + bits[pos + 1 :]
                swap = {vid: other, other: vid}
                edges = [(swap.get(u, u), swap.get(v, v), d) for u, v, d in lvl.graph.edges()]
                mutated = dataclasses.replace(
                    lvl, graph=EdgeLabelledGraph(lvl.graph.vertices, edges)
                )
                yield (
                    f"flip level[{idx}] {vid} bit {pos}",
                    dataclasses.replace(w, levels=w.levels[:idx] + (mutated,) + w.levels[idx + 1 :]),
                )


def label_bump_mutants(w: Witness, rng: random.Random, count: int):
    spots = [("final", None, i) for i in range(len(w.final.edges()))]
    for idx, lvl in enumerate(w.levels):
        spots.extend(("level", idx, i) for i in range(len(lvl.graph.edges())))
    rng.shuffle(spots)
    for kind, idx, i in spots[:count]:
        if kind == "final":
            edges = list(w.final.edges())
            u, v, d = edges[i]
            edges[i] = (u, v, d + 1)
            yield (
                f"bump final edge {u}~{v}",
                dataclasses.replace(w, final=EdgeLabelledGraph(w.final.vertices, edges)),
            )
        else:
            lvl = w.levels[idx]
            edges = list(lvl.graph.edges())
            u, v, d = edges[i]
            edges[i] = (u, v, d + 1)
            mutated = dataclasses.replace(lvl, graph=EdgeLabelledGraph(lvl.graph.vertices, edges))
            yield (
                f"bump level[{idx}] edge {u}~{v}",
                dataclasses.replace(w, levels=w.levels[:idx] + (mutated,) + w.levels[idx + 1 :]),
            )


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("witness", nargs="?", help="witness JSON file")
    ap.add_argument("--demo", action="store_true", help="use the built-in demonstration witness")
    ap.add_argument("--bumps", type=int, default=20, help="number of label-bump mutants")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if args.demo == bool(args.witness):
        ap.error("pass a witness file or --demo, not both or neither")
    w = demo_witness() if args.demo else witness_from_json(load_json(args.witness))

    base = cross_check(w)
    if not base.ok:
        print("the unmutated witness already fails its cross-check; aborting")
        print(base.summary())
        return 1

    rng = random.Random(args.seed)
    mutants = list(bit_flip_mutants(w)) + list(label_bump_mutants(w, rng, args.bumps))
    escaped = []
    for tag, mutant in mutants:
        report = cross_check(mutant)
        verdict = "caught" if not report.ok else "ESCAPED"
        if report.ok:
            escaped.append(tag)
        print(f"{verdict:8s} {tag}")

    print(f"\n{len(mutants) - len(escaped)}/{len(mutants)} mutations caught")
    return 1 if escaped else 0


if __name__ == "__main__":
    sys.exit(main())
