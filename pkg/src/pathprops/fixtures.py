"""Bundled example graph, definitions and queries."""
from __future__ import annotations

import json
from typing import Optional
from importlib import resources

from .files import graph_from_doc, load_graph
from .graph import PropertyGraph
from .properties import PropertyDef
from .syntax import parse_defs, parse_query


def data_path(name: str):
    return resources.files(__package__).joinpath("data", name)


def _text(name: str) -> str:
    return data_path(name).read_text(encoding="utf-8")


def airline_graph(**edge_overrides) -> PropertyGraph:
    """The airports/train-stations graph; ``edge_overrides`` maps edge ids to property updates,
    e.g. ``airline_graph(e3={"dep": 870, "arr": 990})``. A value of None removes the property."""
    doc = json.loads(_text("fig1.json"))
    for item in doc["edges"]:
        for k, v in edge_overrides.get(item["id"], {}).items():
            if v is None:
                item["props"].pop(k, None)
            else:
                item["props"][k] = v
    return graph_from_doc(doc)


def connection_defs(gap: Optional[int] = 90, positive_length: bool = True) -> PropertyDef:
    """Length, cost and start time of connections.

    ``gap`` is the layover a connection must exceed, in minutes; ``None`` drops the layover
    constraint altogether. ``positive_length=False`` drops ``p'.length > 0``.
    """
    text = _text("connections.defs")
    if gap is None:
        text = text.replace(", p'.start > y.arr + 90", "")
    else:
        text = text.replace("y.arr + 90", f"y.arr + {gap}")
    if not positive_length:
        text = text.replace("p'.length > 0, ", "")
    return parse_defs(text)


def barcelona_la_query():
    return parse_query(_text("barcelona_la.query"))


def two_hops_query():
    return parse_query(_text("two_hops.query"))


__all__ = ["airline_graph", "barcelona_la_query", "connection_defs", "data_path", "load_graph", "two_hops_query"]
