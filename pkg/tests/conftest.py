"""Shared fixtures, strategies, and the small-graph corpus.

Fixture spaces reappear across the suite: the 2-point space, the metric
triangles (1,1,2) and (1,2,3), the non-metric triangle (1,1,3), and a
4-point space with spectrum {1,2}.  Hypothesis strategies generate small
edge-labelled graphs directly; random metric spaces are produced by
completing a random connected graph, which is justified independently by
the completion oracles in test_completion.
"""

from __future__ import annotations

import os
import random
from fractions import Fraction
from itertools import combinations

import hypothesis
import pytest
from hypothesis import strategies as st

from eppa import (
    EdgeLabelledGraph,
    PartialMap,
    build_witness,
    complete_graph,
    graph_from_triples,
    shortest_path_completion,
)

hypothesis.settings.register_profile("fast", max_examples=10)
hypothesis.settings.register_profile("deep", max_examples=300)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

LABEL_POOL = (Fraction(1), Fraction(2), Fraction(3), Fraction(1, 2), Fraction(3, 2))


# -- fixed spaces ------------------------------------------------------------


def make_k2() -> EdgeLabelledGraph:
    return complete_graph({("a", "b"): 1})


def make_t112() -> EdgeLabelledGraph:
    return complete_graph({("x", "y"): 1, ("x", "z"): 1, ("y", "z"): 2})


def make_t113() -> EdgeLabelledGraph:
    return complete_graph({("x", "y"): 1, ("x", "z"): 1, ("y", "z"): 3})


def make_t123() -> EdgeLabelledGraph:
    return complete_graph({("x", "y"): 1, ("x", "z"): 2, ("y", "z"): 3})


def make_four_point() -> EdgeLabelledGraph:
    # 4-cycle with unit sides and diagonal 2; spectrum {1, 2}
    return complete_graph(
        {
            ("p", "q"): 1,
            ("q", "r"): 1,
            ("r", "s"): 1,
            ("p", "s"): 1,
            ("p", "r"): 2,
            ("q", "s"): 2,
        }
    )


def make_path2() -> EdgeLabelledGraph:
    return graph_from_triples(["x", "y", "z"], [("x", "y", 1), ("y", "z", 2)])


def make_sixcycle() -> EdgeLabelledGraph:
    # the cycle the valuation expansion makes of the (1,1,3) triangle
    labels = [1, 1, 3, 1, 1, 3]
    names = [f"m{i}" for i in range(6)]
    return graph_from_triples(
        names, [(names[i], names[(i + 1) % 6], labels[i]) for i in range(6)]
    )


@pytest.fixture
def k2():
    return make_k2()


@pytest.fixture
def t112():
    return make_t112()


@pytest.fixture
def t113():
    return make_t113()


@pytest.fixture
def t123():
    return make_t123()


@pytest.fixture
def four_point():
    return make_four_point()


@pytest.fixture
def path2():
    return make_path2()


@pytest.fixture(scope="session")
def k2_witness():
    return build_witness(make_k2())


@pytest.fixture(scope="session")
def t112_witness():
    return build_witness(make_t112())


# -- corpus of small graphs for oracle-agreement tests -----------------------

def _star3() -> EdgeLabelledGraph:
    return graph_from_triples(
        ["c", "l1", "l2", "l3"], [("c", "l1", 1), ("c", "l2", 1), ("c", "l3", 1)]
    )


def _two_components() -> EdgeLabelledGraph:
    return graph_from_triples(
        ["a", "b", "c", "d"], [("a", "b", 1), ("c", "d", 2)]
    )


def _path7() -> EdgeLabelledGraph:
    names = [f"p{i}" for i in range(7)]
    return graph_from_triples(
        names, [(names[i], names[i + 1], i + 1) for i in range(6)]
    )


def _path8() -> EdgeLabelledGraph:
    names = [f"p{i}" for i in range(8)]
    labels = [1, 1, 2, 1, 1, 3, 1]
    return graph_from_triples(
        names, [(names[i], names[i + 1], labels[i]) for i in range(7)]
    )


def small_corpus() -> list[tuple[str, EdgeLabelledGraph]]:
    """Named graphs with at most 8 vertices, mixing metric spaces,
    non-metric graphs, incomplete and disconnected ones."""
    return [
        ("single", graph_from_triples(["o"], [])),
        ("k2", make_k2()),
        ("t112", make_t112()),
        ("t113", make_t113()),
        ("t123", make_t123()),
        ("four-point", make_four_point()),
        ("path2", make_path2()),
        ("star3", _star3()),
        ("two-components", _two_components()),
        ("six-cycle", make_sixcycle()),
        ("path7", _path7()),
        ("path8", _path8()),
    ]


# -- random generation -------------------------------------------------------


def random_connected_graph(
    rng: random.Random,
    max_vertices: int = 7,
    labels: tuple[Fraction, ...] = LABEL_POOL,
    extra_edge_p: float = 0.35,
) -> EdgeLabelledGraph:
    """Random spanning tree plus random extra edges; always connected."""
    n = rng.randint(2, max_vertices)
    names = [f"v{i}" for i in range(n)]
    edges = {}
    for i in range(1, n):
        j = rng.randrange(i)
        edges[(j, i)] = rng.choice(labels)
    for i, j in combinations(range(n), 2):
        if (i, j) not in edges and rng.random() < extra_edge_p:
            edges[(i, j)] = rng.choice(labels)
    return graph_from_triples(
        names, [(names[i], names[j], d) for (i, j), d in edges.items()]
    )


def random_graph(
    rng: random.Random,
    max_vertices: int = 4,
    labels: tuple[Fraction, ...] = (Fraction(1), Fraction(3, 2), Fraction(2)),
    edge_p: float = 0.6,
) -> EdgeLabelledGraph:
    """Random edge-labelled graph, possibly disconnected or edgeless."""
    n = rng.randint(2, max_vertices)
    names = [f"v{i}" for i in range(n)]
    triples = [
        (names[i], names[j], rng.choice(labels))
        for i, j in combinations(range(n), 2)
        if rng.random() < edge_p
    ]
    return graph_from_triples(names, triples)


@st.composite
def edge_labelled_graphs(
    draw, min_vertices=2, max_vertices=5, labels=LABEL_POOL, connected=False
):
    n = draw(st.integers(min_vertices, max_vertices))
    names = [f"v{i}" for i in range(n)]
    chosen = {}
    if connected and n > 1:
        for i in range(1, n):
            j = draw(st.integers(0, i - 1))
            chosen[(j, i)] = draw(st.sampled_from(labels))
    for i, j in combinations(range(n), 2):
        if (i, j) not in chosen and draw(st.integers(0, 2)) == 0:
            chosen[(i, j)] = draw(st.sampled_from(labels))
    return graph_from_triples(
        names, [(names[i], names[j], d) for (i, j), d in chosen.items()]
    )


@st.composite
def connected_graphs(draw, max_vertices=6, labels=LABEL_POOL):
    return draw(
        edge_labelled_graphs(
            min_vertices=2, max_vertices=max_vertices, labels=labels, connected=True
        )
    )


@st.composite
def metric_spaces(draw, max_vertices=5, labels=LABEL_POOL):
    g = draw(connected_graphs(max_vertices=max_vertices, labels=labels))
    return shortest_path_completion(g)


# -- independent checkers used by several test files -------------------------


def triangle_ok(g: EdgeLabelledGraph) -> bool:
    """Completeness plus the triangle inequality, written out plainly."""
    for u, v in combinations(g.vertices, 2):
        if g.label(u, v) is None:
            return False
    for u, v, w in combinations(g.vertices, 3):
        duv, duw, dvw = g.label(u, v), g.label(u, w), g.label(v, w)
        if duv > duw + dvw or duw > duv + dvw or dvw > duv + duw:
            return False
    return True


def induced_nonmetric_sets(g: EdgeLabelledGraph, size: int) -> set[frozenset]:
    """Subset-scan oracle: all vertex sets of the given size whose induced
    subgraph is a cycle with one edge longer than the rest combined."""
    out = set()
    for subset in combinations(g.vertices, size):
        inside = set(subset)
        degs = []
        labels = []
        for u in subset:
            row = [v for v in g.adjacency(u) if v in inside]
            degs.append(len(row))
        if any(d != 2 for d in degs):
            continue
        # connected 2-regular graph on `size` vertices = one cycle
        seen = {subset[0]}
        frontier = [subset[0]]
        while frontier:
            u = frontier.pop()
            for v in g.adjacency(u):
                if v in inside and v not in seen:
                    seen.add(v)
                    frontier.append(v)
        if len(seen) != size:
            continue
        for u, v in combinations(subset, 2):
            d = g.label(u, v)
            if d is not None:
                labels.append(d)
        top = max(labels)
        if labels.count(top) == 1 and top > sum(labels) - top:
            out.add(frozenset(subset))
    return out


def all_automorphisms(g: EdgeLabelledGraph) -> list[PartialMap]:
    """Every total automorphism, by plain backtracking with label pruning."""
    verts = list(g.vertices)
    sig = {
        v: tuple(sorted(g.adjacency(v).values())) for v in verts
    }
    found: list[PartialMap] = []
    assigned: dict[str, str] = {}
    used: set[str] = set()

    def place(pos: int) -> None:
        if pos == len(verts):
            found.append(PartialMap(dict(assigned)))
            return
        u = verts[pos]
        for w in verts:
            if w in used or sig[w] != sig[u]:
                continue
            if any(g.label(u, v) != g.label(w, fv) for v, fv in assigned.items()):
                continue
            assigned[u] = w
            used.add(w)
            place(pos + 1)
            del assigned[u]
            used.discard(w)

    place(0)
    return found
