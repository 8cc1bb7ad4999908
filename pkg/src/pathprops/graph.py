"""Property graphs, values and paths."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

Value = Union[int, Fraction, str, bool]


class GraphError(Exception):
    """Malformed graph data or a lookup of an element that does not exist."""


class UnknownElement(GraphError, KeyError):
    pass


class _Bottom:
    """Unassigned register marker. Unequal to every datum, equal only to itself."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "⊥"

    def __reduce__(self):
        return (_Bottom, ())


BOTTOM = _Bottom()


def value_tag(v) -> str:
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, (int, Fraction)):
        return "num"
    if isinstance(v, str):
        return "text"
    if v is BOTTOM:
        return "bottom"
    raise TypeError(f"not a value: {v!r}")


def is_numeric(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def values_equal(a, b) -> bool:
    # equality never holds across tags (1 != True, 1 != "1")
    return value_tag(a) == value_tag(b) and a == b


def normalize_number(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


def parse_clock(text: str) -> int:
    """'9:00' -> 540. Minutes since midnight; hours may exceed 23."""
    hh, mm = text.split(":")
    h, m = int(hh), int(mm)
    if h < 0 or not 0 <= m < 60:
        raise ValueError(f"bad clock time {text!r}")
    return h * 60 + m


def format_clock(minutes: int) -> str:
    return f"{minutes // 60}:{minutes % 60:02d}"


@dataclass(frozen=True)
class GraphPath:
    """A nonempty path ``(source, e1..ek, target)``; also the canonical key of the path."""

    source: str
    edges: tuple
    target: str

    def __post_init__(self):
        if not self.edges:
            raise ValueError("paths are nonempty")

    def __len__(self):
        return len(self.edges)

    def suffix(self, i: int, graph: "PropertyGraph") -> "GraphPath":
        """Suffix starting at edge index ``i`` (0-based)."""
        if i == 0:
            return self
        return GraphPath(graph.src[self.edges[i]], self.edges[i:], self.target)

    def __str__(self):
        return "(" + self.source + ", " + " ".join(self.edges) + ", " + self.target + ")"


@dataclass(frozen=True, eq=False)
class PropertyGraph:
    nodes: frozenset
    edges: frozenset
    src: Mapping[str, str]
    tgt: Mapping[str, str]
    labels: Mapping[str, frozenset]
    props: Mapping[str, Mapping[str, Value]]
    _out: Mapping[str, tuple] = field(default=None, repr=False, compare=False)
    _in: Mapping[str, tuple] = field(default=None, repr=False, compare=False)
    _by_label: Mapping[str, frozenset] = field(default=None, repr=False, compare=False)

    @classmethod
    def build(cls, nodes: Mapping, edges: Mapping) -> "PropertyGraph":
        """Build from ``{id: {"labels": [...], "props": {...}}}`` and
        ``{id: {"src": .., "tgt": .., "labels": [...], "props": {...}}}``."""
        problems = []
        dup = set(nodes) & set(edges)
        if dup:
            problems.append(f"ids used for both nodes and edges: {sorted(dup)}")
        src, tgt, labels, props = {}, {}, {}, {}
        for n, spec in nodes.items():
            labels[n] = frozenset(spec.get("labels", ()))
            props[n] = dict(spec.get("props", {}))
        for e, spec in edges.items():
            for end in ("src", "tgt"):
                if spec.get(end) not in nodes:
                    problems.append(f"edge {e}: {end} {spec.get(end)} is not a node")
            src[e], tgt[e] = spec.get("src"), spec.get("tgt")
            labels[e] = frozenset(spec.get("labels", ()))
            props[e] = dict(spec.get("props", {}))
        if problems:
            raise GraphError("; ".join(problems))
        out, inc, by_label = {n: [] for n in nodes}, {n: [] for n in nodes}, {}
        for e in sorted(edges, key=_id_order):
            out[src[e]].append(e)
            inc[tgt[e]].append(e)
        for x, ls in labels.items():
            for lab in ls:
                by_label.setdefault(lab, set()).add(x)
        g = cls(frozenset(nodes), frozenset(edges), src, tgt, labels, props)
        object.__setattr__(g, "_out", {n: tuple(v) for n, v in out.items()})
        object.__setattr__(g, "_in", {n: tuple(v) for n, v in inc.items()})
        object.__setattr__(g, "_by_label", {k: frozenset(v) for k, v in by_label.items()})
        return g

    def _check(self, element):
        if element not in self.labels:
            raise UnknownElement(element)

    def is_node(self, element) -> bool:
        return element in self.nodes

    def is_edge(self, element) -> bool:
        return element in self.edges

    def get_property(self, element: str, key: str) -> Optional[Value]:
        self._check(element)
        return self.props[element].get(key)

    def elements_by_label(self, label: str) -> frozenset:
        return self._by_label.get(label, frozenset())

    def out_edges(self, node: str, label: Optional[str] = None) -> tuple:
        """Outgoing edges in ascending id order, optionally restricted to a label."""
        if node not in self.nodes:
            raise UnknownElement(node)
        if label is None:
            return self._out[node]
        return tuple(e for e in self._out[node] if label in self.labels[e])

    def in_edges(self, node: str) -> tuple:
        if node not in self.nodes:
            raise UnknownElement(node)
        return self._in[node]

    def sorted_nodes(self) -> list:
        return sorted(self.nodes, key=_id_order)

    def sorted_edges(self) -> list:
        return sorted(self.edges, key=_id_order)

    def edge_labels(self) -> frozenset:
        out = set()
        for e in self.edges:
            out |= self.labels[e]
        return frozenset(out)

    def validate_path(self, path: GraphPath) -> bool:
        for e in path.edges:
            if e not in self.edges:
                raise UnknownElement(e)
        if self.src[path.edges[0]] != path.source or self.tgt[path.edges[-1]] != path.target:
            return False
        return all(self.src[b] == self.tgt[a] for a, b in zip(path.edges, path.edges[1:]))

    def path(self, edges: Iterable[str]) -> GraphPath:
        """Path from an edge sequence; endpoints read off the first and last edge."""
        edges = tuple(edges)
        p = GraphPath(self.src[edges[0]], edges, self.tgt[edges[-1]])
        if not self.validate_path(p):
            raise GraphError(f"edges {edges} do not chain")
        return p

    def path_nodes(self, path: GraphPath) -> list:
        return [path.source] + [self.tgt[e] for e in path.edges]


def _id_order(ident: str):
    # n2 < n10: compare the alphabetic prefix, then the numeric suffix
    head = ident.rstrip("0123456789")
    tail = ident[len(head):]
    return (head, int(tail) if tail else -1, ident)
