import pytest
from hypothesis import given
from hypothesis import strategies as st

from pathprops.graph import BOTTOM, GraphPath, PropertyGraph, UnknownElement, format_clock, parse_clock, values_equal


def test_property_lookup(g):
    assert g.get_property("e7", "price") == 300
    assert g.get_property("n4", "code") == "BCN"
    assert g.get_property("e7", "gate") is None


def test_unknown_element_is_not_an_absent_property(g):
    with pytest.raises(UnknownElement):
        g.get_property("n99", "loc")


def test_labels(g):
    assert g.elements_by_label("TrainSt") == {"n5", "n6"}
    assert g.elements_by_label("Airport") == {"n1", "n2", "n3", "n4", "n5"}
    assert g.elements_by_label("Harbor") == frozenset()


def test_label_index_matches_full_scan(g):
    for label in ("Airport", "TrainSt", "Flight", "byTrain"):
        assert g.elements_by_label(label) == {x for x in g.labels if label in g.labels[x]}


def test_validate_path(g):
    assert g.validate_path(GraphPath("n5", ("e6", "e7"), "n1"))
    assert g.validate_path(GraphPath("n4", ("e7",), "n1"))
    assert not g.validate_path(GraphPath("n5", ("e7",), "n1"))
    assert not g.validate_path(GraphPath("n5", ("e7", "e6"), "n4"))
    with pytest.raises(UnknownElement):
        g.validate_path(GraphPath("n5", ("e99",), "n1"))


def test_paths_are_nonempty():
    with pytest.raises(ValueError):
        GraphPath("n1", (), "n1")


def test_out_edges(g):
    assert set(g.out_edges("n5", "Flight")) == {"e5", "e6"}
    assert g.out_edges("n1", "Flight") == ()
    assert g.out_edges("n1") == ()
    assert set(g.out_edges("n4")) == {"e7", "e8"}
    with pytest.raises(UnknownElement):
        g.out_edges("nX")


def test_out_edges_consistent_with_labels_and_sources(g):
    for n in g.nodes:
        for label in ("Flight", "byTrain"):
            for e in g.out_edges(n, label):
                assert e in g.elements_by_label(label) and g.src[e] == n


def test_dangling_edge_rejected():
    with pytest.raises(Exception, match="nX"):
        PropertyGraph.build({"n1": {}}, {"e": {"src": "n1", "tgt": "nX"}})


def test_id_spaces_disjoint():
    with pytest.raises(Exception):
        PropertyGraph.build({"a": {}}, {"a": {"src": "a", "tgt": "a"}})


def test_clock():
    assert parse_clock("9:00") == 540
    assert parse_clock("17:00") == 1020
    assert format_clock(1380) == "23:00"


def test_values_compare_within_tag_only():
    assert values_equal(1, 1)
    assert not values_equal(1, "1")
    assert not values_equal(True, 1)
    assert BOTTOM is not None and repr(BOTTOM)


@st.composite
def chains(draw):
    n = draw(st.integers(2, 6))
    nodes = {f"v{i}": {} for i in range(n + 1)}
    edges = {f"c{i}": {"src": f"v{i}", "tgt": f"v{i+1}"} for i in range(n)}
    i, j = sorted(draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True)))
    return PropertyGraph.build(nodes, edges), n, i, j


@given(chains())
def test_swapping_edges_breaks_chaining(case):
    g, n, i, j = case
    edges = [f"c{k}" for k in range(n)]
    assert g.validate_path(GraphPath("v0", tuple(edges), f"v{n}"))
    edges[i], edges[j] = edges[j], edges[i]
    assert not g.validate_path(GraphPath("v0", tuple(edges), f"v{n}"))
