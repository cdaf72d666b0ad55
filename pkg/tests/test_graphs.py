"""Graphs, partial maps, and the structure-preservation checks."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings

from eppa import (
    EdgeLabelledGraph,
    GraphFormatError,
    InvalidMap,
    PartialMap,
    UnknownVertex,
    check_map,
    complete_graph,
    enumerate_partial_automorphisms,
    graph_from_triples,
    induced_subgraph,
    is_metric_space,
    is_partial_automorphism,
)
from conftest import edge_labelled_graphs


# -- construction and basic queries ------------------------------------------


def test_vertices_sorted_and_edges_symmetric(t112):
    assert t112.vertices == ("x", "y", "z")
    assert t112.label("y", "z") == 2
    assert t112.label("z", "y") == 2
    assert t112.edge_count == 3
    assert t112.edges() == (
        ("x", "y", Fraction(1)),
        ("x", "z", Fraction(1)),
        ("y", "z", Fraction(2)),
    )


def test_spectrum_is_ascending_distinct():
    g = graph_from_triples(["a", "b", "c"], [("a", "b", 3), ("b", "c", Fraction(1, 2))])
    assert g.spectrum() == (Fraction(1, 2), Fraction(3))


def test_label_of_non_edge_is_none(path2):
    assert path2.label("x", "z") is None
    assert not path2.is_complete()


def test_neighbors_by_label_buckets(four_point):
    buckets = four_point.neighbors_by_label("p")
    assert buckets == {Fraction(1): ("q", "s"), Fraction(2): ("r",)}


@pytest.mark.parametrize(
    "vertices, edges",
    [
        (["a", "a"], []),  # duplicate vertex
        (["a", "b"], [("a", "a", 1)]),  # loop
        (["a", "b"], [("a", "b", 1), ("b", "a", 1)]),  # duplicate edge, both orders
        (["a"], [("a", "b", 1)]),  # unknown endpoint
    ],
)
def test_bad_construction_rejected(vertices, edges):
    with pytest.raises(GraphFormatError):
        graph_from_triples(vertices, edges)


@pytest.mark.parametrize("label", [0, -1, Fraction(-2, 3), 1.5, True, "2"])
def test_bad_labels_rejected(label):
    with pytest.raises(GraphFormatError):
        graph_from_triples(["a", "b"], [("a", "b", label)])


@pytest.mark.parametrize(
    "name", ["a b", "", "a;b", "x#1", "{y}", "a|b", "a,b", "a!", "~x", "(v)"]
)
def test_reserved_characters_rejected_at_the_boundary(name):
    with pytest.raises(GraphFormatError):
        graph_from_triples([name], [])


def test_derived_ids_allowed_in_core_constructor():
    # machine-made ids reuse the reserved characters; only whitespace is out
    g = EdgeLabelledGraph(["x;01", "{a!1|b!1}"], [("x;01", "{a!1|b!1}", 1)])
    assert len(g) == 2
    with pytest.raises(GraphFormatError):
        EdgeLabelledGraph(["a b"], [])


def test_structural_equality(t112):
    twin = complete_graph({("x", "y"): 1, ("x", "z"): 1, ("y", "z"): 2})
    assert t112 == twin
    assert t112 != complete_graph({("x", "y"): 1, ("x", "z"): 1, ("y", "z"): 3})


# -- dense matrix view -------------------------------------------------------


def test_dense_matrix_scales_fractions_exactly():
    g = graph_from_triples(
        ["a", "b", "c"], [("a", "b", Fraction(1, 2)), ("b", "c", Fraction(3, 2))]
    )
    index, mat, scale = g.dense_matrix()
    assert scale == 2
    assert mat[index["a"], index["b"]] == 1
    assert mat[index["b"], index["c"]] == 3
    assert mat[index["a"], index["c"]] == -1  # missing edge
    assert mat[index["a"], index["a"]] == 0
    assert g.dense_matrix() is g.dense_matrix()  # cached


def test_dense_matrix_refuses_huge_graphs():
    g = EdgeLabelledGraph([f"v{i}" for i in range(4097)], [])
    assert g.dense_matrix() is None


# -- partial maps -------------------------------------------------------------


def test_partial_map_sorted_views():
    f = PartialMap({"b": "c", "a": "b"})
    assert f.domain() == ("a", "b")
    assert f.image() == ("b", "c")
    assert f.items() == (("a", "b"), ("b", "c"))
    assert f["a"] == "b"
    assert "a" in f and "c" not in f
    with pytest.raises(UnknownVertex):
        f["z"]


def test_partial_map_rejects_conflicts_and_non_injective():
    with pytest.raises(InvalidMap):
        PartialMap([("a", "b"), ("a", "c")])
    with pytest.raises(InvalidMap):
        PartialMap([("a", "c"), ("b", "c")])
    # a repeated consistent pair is fine
    assert len(PartialMap([("a", "b"), ("a", "b")])) == 1


def test_partial_map_compose_inverse_extends():
    f = PartialMap({"a": "b", "b": "c"})
    g = PartialMap({"b": "a", "c": "b"})
    assert g.compose(f) == PartialMap({"a": "a", "b": "b"})
    assert f.inverse() == PartialMap({"b": "a", "c": "b"})
    assert f.extends(PartialMap({"a": "b"}))
    assert not f.extends(PartialMap({"a": "c"}))
    assert f.restrict(["a"]) == PartialMap({"a": "b"})
    assert PartialMap.identity(["u", "v"]).is_identity()
    with pytest.raises(InvalidMap):
        PartialMap({"a": "x"}).compose(f)  # image of f not inside the domain


# -- metric predicate ---------------------------------------------------------


def test_is_metric_space_on_fixtures(t112, t113, path2):
    assert is_metric_space(t112)
    assert not is_metric_space(t113)  # 3 > 1 + 1
    assert not is_metric_space(path2)  # incomplete


def test_is_metric_space_large_fast_path():
    names = [f"v{i}" for i in range(70)]
    ones = complete_graph(
        {(names[i], names[j]): 1 for i in range(70) for j in range(i + 1, 70)}
    )
    assert is_metric_space(ones)
    table = {(names[i], names[j]): 1 for i in range(70) for j in range(i + 1, 70)}
    table[("v0", "v1")] = 3
    assert not is_metric_space(complete_graph(table))


# -- induced subgraphs --------------------------------------------------------


def test_induced_subgraph_keeps_inner_edges(four_point):
    sub = induced_subgraph(four_point, ["p", "q", "r"])
    assert sub.vertices == ("p", "q", "r")
    assert sub.label("p", "q") == 1
    assert sub.label("p", "r") == 2
    assert sub.edge_count == 3
    with pytest.raises(UnknownVertex):
        induced_subgraph(four_point, ["p", "nope"])


# -- check_map ----------------------------------------------------------------


def test_check_map_modes_differ_on_reflection(path2):
    target = complete_graph({("a", "b"): 1, ("b", "c"): 2, ("a", "c"): 3})
    f = PartialMap({"x": "a", "y": "b", "z": "c"})
    assert check_map(f, path2, target, "homomorphism")
    assert check_map(f, path2, target, "monomorphism")
    # x~z is a non-edge in the path but an edge in the target
    assert not check_map(f, path2, target, "embedding")


def test_check_map_automorphism_mode(t112):
    swap = PartialMap({"x": "x", "y": "z", "z": "y"})
    assert check_map(swap, t112, t112, "automorphism")
    rotate = PartialMap({"x": "y", "y": "z", "z": "x"})
    assert not check_map(rotate, t112, t112, "automorphism")


def test_check_map_preconditions_raise(t112, t113):
    partial = PartialMap({"x": "x"})
    with pytest.raises(InvalidMap):
        check_map(partial, t112, t112, "automorphism")
    with pytest.raises(InvalidMap):
        check_map(PartialMap.identity(t112.vertices), t112, t113, "automorphism")
    with pytest.raises(ValueError):
        check_map(PartialMap.identity(t112.vertices), t112, t112, "isometry")


def test_is_partial_automorphism_respects_non_edges(path2):
    assert is_partial_automorphism(PartialMap({"x": "z"}), path2)
    # d(x,y)=1 but d(z,y)=2
    assert not is_partial_automorphism(PartialMap({"x": "z", "y": "y"}), path2)
    # non-edge (x,z) against edge (x,y)
    assert not is_partial_automorphism(PartialMap({"x": "x", "z": "y"}), path2)


# -- enumeration --------------------------------------------------------------


def test_enumerate_partial_automorphisms_k2(k2):
    maps = list(enumerate_partial_automorphisms(k2, 2))
    assert maps[0] == PartialMap({})
    assert len(maps) == 7
    assert PartialMap({"a": "b", "b": "a"}) in maps
    assert len(list(enumerate_partial_automorphisms(k2, 0))) == 1
    with pytest.raises(ValueError):
        list(enumerate_partial_automorphisms(k2, -1))


def test_enumerate_partial_automorphisms_counts(t112, t123, four_point):
    assert len(list(enumerate_partial_automorphisms(t112, 3))) == 22
    assert len(list(enumerate_partial_automorphisms(t123, 3))) == 17
    assert len(list(enumerate_partial_automorphisms(four_point, 4))) == 97


@settings(max_examples=40, deadline=None)
@given(edge_labelled_graphs(max_vertices=4))
def test_enumerated_maps_are_partial_automorphisms(g):
    maps = list(enumerate_partial_automorphisms(g, 2))
    assert maps[0] == PartialMap({})
    for f in maps:
        assert is_partial_automorphism(f, g)
    # and the enumeration is complete for singleton domains
    singles = {f.items() for f in maps if len(f) == 1}
    assert len(singles) == len(g) ** 2
