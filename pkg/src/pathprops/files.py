"""Graph JSON documents.

Layout::

    {"time_keys": ["dep", "arr"],
     "nodes": [{"id": "n1", "labels": ["Airport"], "props": {"loc": "Los Angeles"}}],
     "edges": [{"id": "e1", "src": "n1", "tgt": "n2", "labels": ["Flight"], "props": {"price": 300}}]}

Integers, booleans and strings map to themselves; a non-integral number is
written ``{"num": n, "den": d}`` (a JSON float is read exactly through its
decimal text). Properties named in ``time_keys`` hold integer minutes since
midnight. ``meta`` is carried through untouched.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .graph import GraphError, PropertyGraph

DEFAULT_TIME_KEYS = ("dep", "arr")


class GraphFileError(GraphError, ValueError):
    """Invalid graph document; ``problems`` lists every offender found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def _decode(v, where, problems):
    if isinstance(v, bool) or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        f = Fraction(repr(v))
        return int(f) if f.denominator == 1 else f
    if isinstance(v, dict) and set(v) == {"num", "den"}:
        try:
            f = Fraction(int(v["num"]), int(v["den"]))
        except (TypeError, ValueError, ZeroDivisionError):
            problems.append(f"{where}: bad rational {v!r}")
            return None
        return int(f) if f.denominator == 1 else f
    problems.append(f"{where}: unsupported value {v!r}")
    return None


def _encode(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else {"num": v.numerator, "den": v.denominator}
    return v


def graph_from_doc(doc: dict) -> PropertyGraph:
    problems = []
    time_keys = set(doc.get("time_keys", DEFAULT_TIME_KEYS))
    nodes, edges = {}, {}
    seen = set()

    def read(items, kind, into):
        for i, item in enumerate(items):
            ident = item.get("id")
            if not isinstance(ident, str) or not ident:
                problems.append(f"{kind} #{i}: missing id")
                continue
            if ident in seen:
                problems.append(f"duplicate id {ident}")
                continue
            seen.add(ident)
            props = {}
            for k, raw in (item.get("props") or {}).items():
                v = _decode(raw, f"{ident}.{k}", problems)
                if k in time_keys and not (isinstance(v, int) and not isinstance(v, bool) and v >= 0):
                    problems.append(f"{ident}.{k}: time must be a nonnegative integer of minutes, got {raw!r}")
                props[k] = v
            entry = {"labels": list(item.get("labels", ())), "props": props}
            if kind == "edge":
                entry["src"], entry["tgt"] = item.get("src"), item.get("tgt")
            into[ident] = entry

    read(doc.get("nodes", ()), "node", nodes)
    read(doc.get("edges", ()), "edge", edges)
    for e, spec in edges.items():
        for end in ("src", "tgt"):
            if spec[end] not in nodes:
                problems.append(f"edge {e}: {end} {spec[end]} is not a node")
    if problems:
        raise GraphFileError(problems)
    return PropertyGraph.build(nodes, edges)


def graph_to_doc(g: PropertyGraph, time_keys=DEFAULT_TIME_KEYS) -> dict:
    def props(x):
        return {k: _encode(v) for k, v in sorted(g.props[x].items())}

    return {
        "time_keys": list(time_keys),
        "nodes": [{"id": n, "labels": sorted(g.labels[n]), "props": props(n)} for n in g.sorted_nodes()],
        "edges": [
            {"id": e, "src": g.src[e], "tgt": g.tgt[e], "labels": sorted(g.labels[e]), "props": props(e)}
            for e in g.sorted_edges()
        ],
    }


def dumps_graph(g: PropertyGraph, time_keys=DEFAULT_TIME_KEYS) -> str:
    return json.dumps(graph_to_doc(g, time_keys), indent=1, sort_keys=False) + "\n"


def load_graph(path) -> PropertyGraph:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise GraphFileError([f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"])
    if not isinstance(doc, dict):
        raise GraphFileError([f"{path}: expected a JSON object"])
    return graph_from_doc(doc)


def save_graph(g: PropertyGraph, path, time_keys=DEFAULT_TIME_KEYS) -> None:
    Path(path).write_text(dumps_graph(g, time_keys), encoding="utf-8")
