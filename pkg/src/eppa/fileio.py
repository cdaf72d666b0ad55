"""File formats: graphs, partial maps, witnesses, verification reports.

Graph files are JSON objects `{"vertices": [...], "edges": [[u, v, label]]}`
with labels written as positive fractions in lowest terms ("3" or "3/2",
never "6/4" or "3/1").  Map files are JSON lists of `[source, target]` pairs.
Witness files bundle everything `build_witness` produced, with a format
version field; their graphs use an indexed edge encoding to stay compact.
All parsers reject structurally invalid input with the offending element
named in the error.
"""

from __future__ import annotations

import json
import math
import re
from fractions import Fraction
from typing import Any

from .completion import CycleWitness
from .errors import GraphFormatError
from .graphs import EdgeLabelledGraph, PartialMap, graph_from_triples
from .levels import BadSet, LevelGraph
from .pipeline import Config, Witness
from .setrep import SetAssignment, token_sort_key
from .verifier import VerificationReport

WITNESS_FORMAT = "eppa-witness/1"

_LABEL_RE = re.compile(r"^(0|[1-9][0-9]*)(?:/([1-9][0-9]*))?$")


def format_label(d: Fraction) -> str:
    return str(d.numerator) if d.denominator == 1 else f"{d.numerator}/{d.denominator}"


def parse_label(text: Any) -> Fraction:
    """Strict label syntax: a positive fraction in lowest terms.

    Integers must not carry a denominator ("3/1" is rejected), fractions
    must be fully reduced ("6/4" is rejected), and zero is not a distance.
    """
    if not isinstance(text, str):
        raise GraphFormatError(f"label must be a string, got {text!r}")
    match = _LABEL_RE.match(text)
    if not match:
        raise GraphFormatError(f"malformed label {text!r}")
    p = int(match.group(1))
    q = int(match.group(2)) if match.group(2) else None
    if p == 0:
        raise GraphFormatError(f"label {text!r} is not a positive distance")
    if q is not None:
        if q == 1:
            raise GraphFormatError(f"label {text!r} is not in lowest terms (write {p})")
        if math.gcd(p, q) != 1:
            raise GraphFormatError(f"label {text!r} is not in lowest terms")
        return Fraction(p, q)
    return Fraction(p)


def graph_to_json(g: EdgeLabelledGraph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [[u, v, format_label(d)] for u, v, d in g.edges()],
    }


def graph_from_json(obj: Any, strict_names: bool = True) -> EdgeLabelledGraph:
    """Parse the named graph format, validating every element.

    `strict_names` enforces the input-vertex alphabet; generated graphs
    (completions of witness internals) carry structural characters in their
    ids and are parsed with it off.
    """
    if not isinstance(obj, dict):
        raise GraphFormatError("graph file must be a JSON object")
    unknown = set(obj) - {"vertices", "edges"}
    if unknown:
        raise GraphFormatError(f"unexpected graph keys {sorted(unknown)}")
    verts = obj.get("vertices")
    edges = obj.get("edges")
    if not isinstance(verts, list) or not all(isinstance(v, str) for v in verts):
        raise GraphFormatError("\"vertices\" must be a list of strings")
    if not isinstance(edges, list):
        raise GraphFormatError("\"edges\" must be a list")
    triples = []
    for pos, e in enumerate(edges):
        if not (isinstance(e, list) and len(e) == 3 and isinstance(e[0], str) and isinstance(e[1], str)):
            raise GraphFormatError(f"edge #{pos} must be [vertex, vertex, label], got {e!r}")
        try:
            triples.append((e[0], e[1], parse_label(e[2])))
        except GraphFormatError as exc:
            raise GraphFormatError(f"edge #{pos} [{e[0]!r}, {e[1]!r}]: {exc}") from None
    if strict_names:
        return graph_from_triples(verts, triples)
    return EdgeLabelledGraph(verts, triples)


def map_to_json(f: PartialMap) -> list:
    return [[u, v] for u, v in f.items()]


def map_from_json(obj: Any) -> PartialMap:
    if not isinstance(obj, list):
        raise GraphFormatError("map file must be a JSON list of [source, target] pairs")
    table = {}
    for pos, pair in enumerate(obj):
        if not (isinstance(pair, list) and len(pair) == 2
                and all(isinstance(x, str) for x in pair)):
            raise GraphFormatError(f"map entry #{pos} must be [source, target], got {pair!r}")
        if pair[0] in table:
            raise GraphFormatError(f"map entry #{pos} repeats source {pair[0]!r}")
        table[pair[0]] = pair[1]
    return PartialMap(table)


# -- compact graph encoding for witness internals ----------------------------


def _indexed_graph(g: EdgeLabelledGraph) -> dict:
    index = {v: i for i, v in enumerate(g.vertices)}
    return {
        "vertices": list(g.vertices),
        "edges_ix": [[index[u], index[v], format_label(d)] for u, v, d in g.edges()],
    }


def _graph_from_indexed(obj: Any, what: str) -> EdgeLabelledGraph:
    if not isinstance(obj, dict) or "vertices" not in obj or "edges_ix" not in obj:
        raise GraphFormatError(f"{what}: expected an indexed graph object")
    verts = obj["vertices"]
    if not isinstance(verts, list) or not all(isinstance(v, str) for v in verts):
        raise GraphFormatError(f"{what}: \"vertices\" must be a list of strings")
    n = len(verts)
    triples = []
    for pos, e in enumerate(obj["edges_ix"]):
        if not (isinstance(e, list) and len(e) == 3
                and isinstance(e[0], int) and isinstance(e[1], int)
                and 0 <= e[0] < n and 0 <= e[1] < n):
            raise GraphFormatError(f"{what}: edge #{pos} has bad vertex indices: {e!r}")
        try:
            triples.append((verts[e[0]], verts[e[1]], parse_label(e[2])))
        except GraphFormatError as exc:
            raise GraphFormatError(f"{what}: edge #{pos}: {exc}") from None
    return EdgeLabelledGraph(verts, triples)


def _pairs(obj: Any, what: str) -> list[tuple[str, str]]:
    if not isinstance(obj, list):
        raise GraphFormatError(f"{what}: expected a list of pairs")
    out = []
    for pos, pair in enumerate(obj):
        if not (isinstance(pair, list) and len(pair) == 2
                and all(isinstance(x, str) for x in pair)):
            raise GraphFormatError(f"{what}: entry #{pos} must be a pair of strings")
        out.append((pair[0], pair[1]))
    return out


def _cycle_to_json(w: CycleWitness) -> dict:
    return {
        "vertices": list(w.vertices),
        "long_edge": list(w.long_edge),
        "deficit": format_label(w.deficit),
    }


def _cycle_from_json(obj: Any) -> CycleWitness:
    if not isinstance(obj, dict):
        raise GraphFormatError("cycle witness must be an object")
    verts = obj.get("vertices")
    long_edge = obj.get("long_edge")
    if not (isinstance(verts, list) and all(isinstance(v, str) for v in verts)):
        raise GraphFormatError("cycle witness vertices must be strings")
    if not (isinstance(long_edge, list) and len(long_edge) == 2):
        raise GraphFormatError("cycle witness long_edge must be a pair")
    return CycleWitness(
        vertices=tuple(verts),
        long_edge=(long_edge[0], long_edge[1]),
        deficit=parse_label(obj.get("deficit")),
    )


def _level_to_json(lvl: LevelGraph) -> dict:
    return {
        "level": lvl.level,
        "graph": _indexed_graph(lvl.graph),
        "base_embedding": map_to_json(lvl.base_embedding),
        "projection": [[u, v] for u, v in sorted(lvl.projection.items())],
        "bad_sets": [
            {
                "members": sorted(m.members),
                "long_edge": list(m.long_edge),
                "cycle": _cycle_to_json(m.cycle),
            }
            for m in lvl.bad_sets
        ],
    }


def _level_from_json(obj: Any, pos: int) -> LevelGraph:
    what = f"level #{pos}"
    if not isinstance(obj, dict):
        raise GraphFormatError(f"{what}: expected an object")
    level = obj.get("level")
    if not isinstance(level, int):
        raise GraphFormatError(f"{what}: \"level\" must be an integer")
    bad = []
    for j, m in enumerate(obj.get("bad_sets", ())):
        if not isinstance(m, dict):
            raise GraphFormatError(f"{what}: bad set #{j} must be an object")
        members = m.get("members")
        long_edge = m.get("long_edge")
        if not (isinstance(members, list) and all(isinstance(x, str) for x in members)):
            raise GraphFormatError(f"{what}: bad set #{j} members must be strings")
        if not (isinstance(long_edge, list) and len(long_edge) == 2):
            raise GraphFormatError(f"{what}: bad set #{j} long_edge must be a pair")
        bad.append(
            BadSet(
                members=frozenset(members),
                long_edge=(long_edge[0], long_edge[1]),
                cycle=_cycle_from_json(m.get("cycle")),
            )
        )
    return LevelGraph(
        graph=_graph_from_indexed(obj.get("graph"), what),
        level=level,
        base_embedding=PartialMap(dict(_pairs(obj.get("base_embedding"), what))),
        projection=dict(_pairs(obj.get("projection", []), what)),
        bad_sets=tuple(bad),
    )


def _assignment_to_json(sa: SetAssignment) -> dict:
    return {
        "k": sa.k,
        "universe": list(sa.universe),
        "psi": [[x, sorted(sa.psi[x], key=token_sort_key)] for x in sa.graph.vertices],
    }


def _assignment_from_json(obj: Any, graph: EdgeLabelledGraph) -> SetAssignment:
    if not isinstance(obj, dict) or not isinstance(obj.get("k"), int):
        raise GraphFormatError("set assignment must be an object with integer k")
    universe = obj.get("universe")
    if not (isinstance(universe, list) and all(isinstance(t, str) for t in universe)):
        raise GraphFormatError("set assignment universe must be a list of strings")
    psi = {}
    for pos, entry in enumerate(obj.get("psi", ())):
        if not (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], str)
                and isinstance(entry[1], list)):
            raise GraphFormatError(f"set assignment psi entry #{pos} malformed")
        psi[entry[0]] = frozenset(entry[1])
    return SetAssignment(graph=graph, k=obj["k"], psi=psi, universe=tuple(universe))


def witness_to_json(w: Witness) -> dict:
    return {
        "format": WITNESS_FORMAT,
        "input": graph_to_json(w.input),
        "set_assignment": None if w.set_assignment is None else _assignment_to_json(w.set_assignment),
        "levels": [_level_to_json(lvl) for lvl in w.levels],
        "component": list(w.component),
        "final": _indexed_graph(w.final),
        "final_embedding": map_to_json(w.final_embedding),
        "n": w.n,
        "config": {
            "vertex_cap": w.config.vertex_cap,
            "search_budget": w.config.search_budget,
            "coherent": w.config.coherent,
        },
    }


def witness_from_json(obj: Any) -> Witness:
    if not isinstance(obj, dict):
        raise GraphFormatError("witness file must be a JSON object")
    if obj.get("format") != WITNESS_FORMAT:
        raise GraphFormatError(
            f"unsupported witness format {obj.get('format')!r}, expected {WITNESS_FORMAT!r}"
        )
    a = graph_from_json(obj.get("input"))
    sa = obj.get("set_assignment")
    cfg = obj.get("config") or {}
    if not isinstance(cfg, dict):
        raise GraphFormatError("witness config must be an object")
    n = obj.get("n")
    if not isinstance(n, int):
        raise GraphFormatError("witness field \"n\" must be an integer")
    component = obj.get("component")
    if not (isinstance(component, list) and all(isinstance(v, str) for v in component)):
        raise GraphFormatError("witness component must be a list of vertex ids")
    return Witness(
        input=a,
        set_assignment=None if sa is None else _assignment_from_json(sa, a),
        levels=tuple(
            _level_from_json(lvl, pos) for pos, lvl in enumerate(obj.get("levels", ()))
        ),
        component=tuple(component),
        final=_graph_from_indexed(obj.get("final"), "final"),
        final_embedding=PartialMap(dict(_pairs(obj.get("final_embedding"), "final_embedding"))),
        n=n,
        config=Config(
            vertex_cap=cfg.get("vertex_cap", 200_000),
            search_budget=cfg.get("search_budget", 10_000_000),
            coherent=cfg.get("coherent", True),
        ),
    )


def _counterexample_to_json(value: object) -> object:
    if value is None:
        return None
    if isinstance(value, PartialMap):
        return map_to_json(value)
    if isinstance(value, CycleWitness):
        return _cycle_to_json(value)
    if isinstance(value, (tuple, list)):
        return list(value)
    return str(value)


def report_to_json(r: VerificationReport) -> dict:
    return {
        "ok": r.ok,
        "budget_exhausted": r.budget_exhausted,
        "totals": dict(r.totals),
        "checks": [
            {
                "name": c.name,
                "passed": c.passed,
                "detail": c.detail,
                "skipped": c.skipped,
                "counterexample": _counterexample_to_json(c.counterexample),
            }
            for c in r.results
        ],
    }


def load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise GraphFormatError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path} is not valid JSON: {exc}") from None


def dump_json(path: str, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=None, separators=(",", ":"))
        fh.write("\n")
