import json
from fractions import Fraction

import pytest

from pathprops.files import GraphFileError, dumps_graph, graph_from_doc, load_graph, save_graph
from pathprops.fixtures import airline_graph, data_path


def test_fixture_shape():
    g = load_graph(data_path("fig1.json"))
    assert len(g.nodes) == 6 and len(g.edges) == 8


def test_empty_document():
    g = graph_from_doc({"nodes": [], "edges": []})
    assert not g.nodes and not g.edges


def test_dangling_endpoint_names_edge_and_node():
    doc = {"nodes": [{"id": "n1"}], "edges": [{"id": "e", "src": "nX", "tgt": "n1"}]}
    with pytest.raises(GraphFileError) as err:
        graph_from_doc(doc)
    assert "e" in str(err.value) and "nX" in str(err.value)


def test_all_problems_are_listed():
    doc = {
        "nodes": [{"id": "n1"}, {"id": "n1"}],
        "edges": [{"id": "e", "src": "n1", "tgt": "n1", "props": {"dep": 9.5}}, {"id": "f", "src": "n2", "tgt": "n1"}],
    }
    with pytest.raises(GraphFileError) as err:
        graph_from_doc(doc)
    text = "\n".join(err.value.problems)
    assert "duplicate id n1" in text and "e.dep" in text and "n2" in text
    assert len(err.value.problems) == 3


def test_negative_time_rejected():
    doc = {"nodes": [{"id": "a"}], "edges": [{"id": "e", "src": "a", "tgt": "a", "props": {"arr": -5}}]}
    with pytest.raises(GraphFileError, match="e.arr"):
        graph_from_doc(doc)


def test_round_trip_is_stable(tmp_path):
    g = airline_graph()
    save_graph(g, tmp_path / "g.json")
    again = load_graph(tmp_path / "g.json")
    assert dumps_graph(again) == dumps_graph(g)
    assert again.props == g.props and again.labels == g.labels and again.src == g.src


def test_numbers_are_exact(tmp_path):
    doc = {"nodes": [{"id": "a", "props": {"w": 0.1, "r": {"num": 1, "den": 3}, "i": 2.0}}], "edges": []}
    g = graph_from_doc(doc)
    assert g.props["a"] == {"w": Fraction(1, 10), "r": Fraction(1, 3), "i": 2}
    back = json.loads(dumps_graph(g))
    assert back["nodes"][0]["props"]["r"] == {"num": 1, "den": 3}


def test_invalid_json_reported(tmp_path):
    (tmp_path / "bad.json").write_text("{nodes: }")
    with pytest.raises(GraphFileError, match="invalid JSON"):
        load_graph(tmp_path / "bad.json")


def test_synthetic_values_are_marked():
    meta = json.loads(data_path("fig1.json").read_text())["meta"]
    assert "e7.price" not in meta["synthetic"] and "e6.dep" not in meta["synthetic"]
