"""Shortest-path completion and non-metric cycle detection.

The cycle finder is checked against a plain subset-scan oracle, and the
completion against hand-computed distances, a closed-form oracle on a large
cycle, and the metric/label-preservation/automorphism properties.
"""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings

from eppa import (
    BudgetExhausted,
    CycleWitness,
    DisconnectedGraph,
    find_induced_nonmetric_cycles,
    graph_from_triples,
    has_nonmetric_cycle_up_to,
    is_connected,
    is_metric_space,
    shortest_path_completion,
)
from conftest import (
    all_automorphisms,
    connected_graphs,
    edge_labelled_graphs,
    induced_nonmetric_sets,
    make_sixcycle,
    triangle_ok,
)


# -- completion ---------------------------------------------------------------


def test_completion_of_unit_path_is_112():
    path = graph_from_triples(["x", "y", "z"], [("x", "y", 1), ("y", "z", 1)])
    done = shortest_path_completion(path)
    assert done.label("x", "z") == 2
    assert done.label("x", "y") == 1
    assert done.is_complete()


def test_completion_shrinks_the_long_edge(t113):
    done = shortest_path_completion(t113)
    assert done.label("y", "z") == 2  # was 3, rerouted through x
    assert done.label("x", "y") == 1
    assert is_metric_space(done)


def test_completion_requires_connected(path2):
    lonely = graph_from_triples(["a", "b", "c"], [("a", "b", 1)])
    assert not is_connected(lonely)
    with pytest.raises(DisconnectedGraph):
        shortest_path_completion(lonely)
    assert is_connected(path2)


def test_connectivity_of_empty_graph_is_undefined():
    with pytest.raises(ValueError):
        is_connected(graph_from_triples([], []))


def test_completion_large_cycle_closed_form():
    # 70 unit edges in a ring: distance is the shorter way around;
    # exercises the dense all-pairs path (the graph is above 64 vertices)
    n = 70
    names = [f"c{i:02d}" for i in range(n)]
    ring = graph_from_triples(
        names, [(names[i], names[(i + 1) % n], 1) for i in range(n)]
    )
    done = shortest_path_completion(ring)
    for i in range(0, n, 7):
        for j in range(i + 1, n, 11):
            want = min(j - i, n - (j - i))
            assert done.label(names[i], names[j]) == want


def test_completion_exact_with_fraction_labels():
    g = graph_from_triples(
        ["a", "b", "c"],
        [("a", "b", Fraction(1, 3)), ("b", "c", Fraction(1, 7))],
    )
    done = shortest_path_completion(g)
    assert done.label("a", "c") == Fraction(10, 21)


@settings(max_examples=60, deadline=None)
@given(connected_graphs(max_vertices=6))
def test_completion_is_metric(g):
    assert triangle_ok(shortest_path_completion(g))


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_vertices=6))
def test_completion_is_idempotent(g):
    done = shortest_path_completion(g)
    assert shortest_path_completion(done) == done


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_vertices=6))
def test_completion_preserves_labels_iff_no_induced_nonmetric_cycle(g):
    done = shortest_path_completion(g)
    preserved = all(done.label(u, v) == d for u, v, d in g.edges())
    has_bad = any(
        induced_nonmetric_sets(g, size) for size in range(3, len(g) + 1)
    )
    assert preserved == (not has_bad)


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_vertices=6))
def test_completion_keeps_automorphisms(g):
    done = shortest_path_completion(g)
    autos = all_automorphisms(g)
    assert autos  # at least the identity
    for f in autos:
        pairs = f.items()
        for i, (u, fu) in enumerate(pairs):
            for v, fv in pairs[i + 1 :]:
                assert done.label(u, v) == done.label(fu, fv)


# -- induced non-metric cycles -------------------------------------------------


def test_find_cycles_on_the_nonmetric_triangle(t113):
    found = find_induced_nonmetric_cycles(t113, 3)
    assert len(found) == 1
    w = found[0]
    assert sorted(w.vertices) == ["x", "y", "z"]
    assert w.long_edge == ("y", "z")
    assert w.deficit == 1  # 3 - (1 + 1)
    assert w.check(t113)


def test_find_cycles_metric_triangle_has_none(t112):
    assert find_induced_nonmetric_cycles(t112, 3) == []


def test_find_cycles_size_four():
    # square with one heavy side: 5 > 1+1+1
    g = graph_from_triples(
        ["a", "b", "c", "d"],
        [("a", "b", 1), ("b", "c", 1), ("c", "d", 1), ("a", "d", 5)],
    )
    found = find_induced_nonmetric_cycles(g, 4)
    assert len(found) == 1
    assert found[0].long_edge == ("a", "d")
    assert found[0].deficit == 2
    # a chord splits the square; the 4-set is then no longer induced
    chorded = graph_from_triples(
        ["a", "b", "c", "d"],
        [("a", "b", 1), ("b", "c", 1), ("c", "d", 1), ("a", "d", 5), ("a", "c", 1)],
    )
    assert find_induced_nonmetric_cycles(chorded, 4) == []
    assert len(find_induced_nonmetric_cycles(chorded, 3)) == 1  # (a,c,d) is bad


def test_find_cycles_rejects_tiny_sizes(t113):
    with pytest.raises(ValueError):
        find_induced_nonmetric_cycles(t113, 2)


def test_sixcycle_has_no_induced_nonmetric_cycles():
    c6 = make_sixcycle()
    for size in range(3, 7):
        assert find_induced_nonmetric_cycles(c6, size) == []


@settings(max_examples=60, deadline=None)
@given(edge_labelled_graphs(max_vertices=6))
def test_find_cycles_agrees_with_subset_scan(g):
    for size in range(3, len(g) + 1):
        found = find_induced_nonmetric_cycles(g, size)
        got = {frozenset(w.vertices) for w in found}
        assert got == induced_nonmetric_sets(g, size)
        assert len(got) == len(found)  # one witness per vertex set
        for w in found:
            assert w.check(g)


# -- bounded cycle search -----------------------------------------------------


def test_cycle_witness_check_rejects_corruption(t113):
    w = find_induced_nonmetric_cycles(t113, 3)[0]
    assert not CycleWitness(w.vertices, w.long_edge, w.deficit + 1).check(t113)
    assert not CycleWitness(w.vertices, ("z", "y"), w.deficit).check(t113)
    assert not CycleWitness(("x", "y"), w.long_edge, w.deficit).check(t113)
    assert not CycleWitness(("x", "y", "y"), w.long_edge, w.deficit).check(t113)


def test_has_nonmetric_cycle_up_to_finds_and_bounds(t113, t112):
    got = has_nonmetric_cycle_up_to(t113, 3)
    assert got is not None and got.check(t113)
    assert has_nonmetric_cycle_up_to(t112, 3) is None
    with pytest.raises(ValueError):
        has_nonmetric_cycle_up_to(t113, 2)


def test_has_nonmetric_cycle_respects_the_size_bound():
    # the only bad cycle needs 4 vertices, so a bound of 3 sees nothing
    g = graph_from_triples(
        ["a", "b", "c", "d"],
        [("a", "b", 1), ("b", "c", 1), ("c", "d", 1), ("a", "d", 5)],
    )
    assert has_nonmetric_cycle_up_to(g, 3) is None
    assert has_nonmetric_cycle_up_to(g, 4) is not None


def test_has_nonmetric_cycle_budget_is_loud(t113):
    with pytest.raises(BudgetExhausted):
        has_nonmetric_cycle_up_to(t113, 3, budget=1)


@settings(max_examples=60, deadline=None)
@given(edge_labelled_graphs(max_vertices=6))
def test_bounded_search_agrees_with_induced_scan(g):
    # non-induced bad cycles always contain an induced one no larger, so the
    # bounded search is empty exactly when the induced scan is
    top = max(3, len(g))
    got = has_nonmetric_cycle_up_to(g, top)
    induced = any(induced_nonmetric_sets(g, s) for s in range(3, top + 1))
    assert (got is not None) == induced
    if got is not None:
        assert got.check(g)
