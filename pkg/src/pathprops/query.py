"""Patterns, clauses, queries and answers."""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import GraphPath, PropertyGraph
from .regex import Regex, RegexError, matches_label_sets, to_grammar, to_text
from .terms import EDGE, NODE, PATH, And, filter_vars

RESERVED_PREFIX = "_"


class QueryError(ValueError):
    """Ill-formed query: empty, conflicting variable kinds, reserved names."""


@dataclass(frozen=True)
class NodePattern:
    var: object  # Var of kind node
    labels: frozenset = frozenset()

    def __str__(self):
        return f"({self.var}{_labels(self.labels)})"


@dataclass(frozen=True)
class EdgePattern:
    src: NodePattern
    edge: object
    labels: frozenset
    tgt: NodePattern

    def __str__(self):
        return f"{self.src} -[{self.edge}{_labels(self.labels)}]-> {self.tgt}"


@dataclass(frozen=True)
class PathPattern:
    src: NodePattern
    path: object
    regex: Regex
    tgt: NodePattern

    def __str__(self):
        # paths are never empty, so the ε-free form of the regex reads the same
        try:
            text = to_text(to_grammar(self.regex))
        except RegexError:
            text = "∅"
        return f"{self.src} =[{self.path}:{text}]=> {self.tgt}"


def _labels(ls) -> str:
    return "".join(":" + x for x in sorted(ls))


@dataclass(frozen=True)
class Clause:
    pattern: object
    filters: tuple = ()

    def pattern_vars(self) -> set:
        p = self.pattern
        if isinstance(p, NodePattern):
            return {p.var}
        if isinstance(p, EdgePattern):
            return {p.src.var, p.edge, p.tgt.var}
        return {p.src.var, p.tgt.var}

    def all_vars(self) -> set:
        """Node, edge and path variables of the pattern and the filter."""
        out = set(self.pattern_vars())
        if isinstance(self.pattern, PathPattern):
            out.add(self.pattern.path)
        out |= filter_vars(And(self.filters))
        return out

    def __str__(self):
        from .terms import to_text

        body = ", ".join(to_text(f) for f in self.filters)
        return f"{self.pattern}" + (f" where {body}" if body else "")


@dataclass(frozen=True)
class Query:
    clauses: tuple

    def __post_init__(self):
        if not self.clauses:
            raise QueryError("a query needs at least one clause")
        kinds = {}
        for c in self.clauses:
            for v in c.all_vars():
                if v.name.startswith(RESERVED_PREFIX):
                    raise QueryError(f"variable names starting with {RESERVED_PREFIX!r} are reserved: {v.name}")
                if kinds.setdefault(v.name, v.kind) != v.kind:
                    raise QueryError(f"variable {v.name} used as both {kinds[v.name]} and {v.kind}")

    def variables(self) -> set:
        out = set()
        for c in self.clauses:
            out |= c.all_vars()
        return {v for v in out if v.kind in (NODE, EDGE, PATH)}


@dataclass(frozen=True)
class Answer:
    """A general match plus, per path variable, its property report."""

    bindings: tuple  # sorted (name, element id or GraphPath)
    report: tuple = field(default=(), compare=False)  # (path name, {prop: value}, residual texts)
    store: object = field(default=None, compare=False, repr=False)

    def as_dict(self) -> dict:
        return dict(self.bindings)

    def __getitem__(self, name):
        return self.as_dict()[name]


# -- match conditions -------------------------------------------------------

def node_fits(g: PropertyGraph, node: str, labels: frozenset) -> bool:
    return labels <= g.labels[node]


def edge_fits(g: PropertyGraph, edge: str, labels) -> bool:
    """``labels`` is a frozenset (edge patterns), a single symbol, or None (any labelled edge)."""
    have = g.labels[edge]
    if labels is None:
        return bool(have)
    if isinstance(labels, str):
        return labels in have
    return labels <= have


def path_fits(g: PropertyGraph, pattern: PathPattern, path: GraphPath) -> bool:
    return (
        node_fits(g, path.source, pattern.src.labels)
        and node_fits(g, path.target, pattern.tgt.labels)
        and matches_label_sets(pattern.regex, [g.labels[e] for e in path.edges])
    )
