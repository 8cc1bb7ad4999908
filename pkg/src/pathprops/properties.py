"""Path property definitions, pattern unfoldings and their constraint sets."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

from .graph import GraphPath, PropertyGraph
from .query import NodePattern, PathPattern
from .regex import Regex, decompose, is_universal_plus, symbols
from .store import ConstraintStore
from .terms import (
    EDGE,
    NODE,
    PATH,
    Elem,
    Prop,
    Var,
    apply_substitution,
    filter_props,
    filter_vars,
    ground_props,
)


class DefinitionError(ValueError):
    pass


X, X_END, X_MID = Var("x", NODE), Var("x'", NODE), Var("x''", NODE)
Y = Var("y", EDGE)


@dataclass(frozen=True)
class PropertyDef:
    """Properties of the unfolded path variable, defined by one constraint set for
    the single-edge case and one for the edge-then-subpath case."""

    props: tuple = ()
    pathvar: str = "p"
    delta_edge: tuple = ()
    delta_step: tuple = ()
    integer_props: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "props", tuple(self.props))
        object.__setattr__(self, "delta_edge", tuple(self.delta_edge))
        object.__setattr__(self, "delta_step", tuple(self.delta_step))
        object.__setattr__(self, "integer_props", frozenset(self.integer_props))
        self.validate()

    @property
    def path(self) -> Var:
        return Var(self.pathvar, PATH)

    @property
    def subpath(self) -> Var:
        return Var(self.pathvar + "'", PATH)

    def reserved(self, step: bool) -> set:
        base = {X, X_END, Y, self.path}
        return base | {X_MID, self.subpath} if step else base

    def validate(self):
        if not set(self.integer_props) <= set(self.props):
            raise DefinitionError(f"integer properties {sorted(set(self.integer_props) - set(self.props))} are not declared")
        for step, cases in ((False, self.delta_edge), (True, self.delta_step)):
            allowed = self.reserved(step)
            for f in cases:
                for v in filter_vars(f):
                    if v not in allowed:
                        raise DefinitionError(f"unknown reserved variable {v.name}")
                for pr in filter_props(f):
                    if pr.subject in (self.path, self.subpath) and pr.key not in self.props:
                        raise DefinitionError(f"property {pr.key} is not declared")

    def new_store(self) -> ConstraintStore:
        return ConstraintStore(self.integer_props)


EMPTY_DEF = PropertyDef()


# -- unfoldings ----------------------------------------------------------------

@dataclass(frozen=True)
class EdgeUnfolding:
    src: NodePattern
    edge: Var
    label: Optional[str]  # None: any labelled edge
    tgt: NodePattern


@dataclass(frozen=True)
class StepUnfolding:
    src: NodePattern
    edge: Var
    label: Optional[str]
    mid: NodePattern
    path: Var
    regex: Regex
    tgt: NodePattern

    def continuation(self) -> PathPattern:
        return PathPattern(self.mid, self.path, self.regex, self.tgt)


class FreshNames:
    """Generator of unfolding variables; names start with '_' so they never clash with user names."""

    def __init__(self, start: int = 0):
        self.next = start

    def __call__(self, kind: str) -> Var:
        prefix = {NODE: "_x", EDGE: "_y", PATH: "_p"}[kind]
        self.next += 1
        return Var(f"{prefix}{self.next - 1}", kind)


def unfold_pattern(pattern: PathPattern, alphabet, fresh: Optional[Callable] = None) -> list:
    """Single-edge unfoldings first (one per letter of S0), then steps (one per letter of S1).

    When the regex denotes every nonempty word over ``alphabet``, the two
    unfoldings use an unlabelled edge and keep the regex unchanged.
    """
    fresh = fresh or FreshNames()
    universal, s0, steps = unfolding_plan(pattern.regex, frozenset(alphabet) | symbols(pattern.regex))
    if universal:
        return [
            EdgeUnfolding(pattern.src, fresh(EDGE), None, pattern.tgt),
            StepUnfolding(pattern.src, fresh(EDGE), None, NodePattern(fresh(NODE)), fresh(PATH), pattern.regex, pattern.tgt),
        ]
    out = [EdgeUnfolding(pattern.src, fresh(EDGE), a, pattern.tgt) for a in s0]
    for b, rem in steps:
        out.append(StepUnfolding(pattern.src, fresh(EDGE), b, NodePattern(fresh(NODE)), fresh(PATH), rem, pattern.tgt))
    return out


@lru_cache(maxsize=4096)
def unfolding_plan(regex: Regex, alphabet: frozenset):
    """``(universal, sorted single-edge labels, sorted (label, remainder) steps)``."""
    if is_universal_plus(regex, alphabet):
        return True, (), ()
    d = decompose(regex, alphabet)
    return False, tuple(sorted(d.s0)), tuple((b, d.rem[b]) for b in sorted(d.s1))


def constr_pu(pattern: PathPattern, u, pdef: PropertyDef) -> tuple:
    """The definition's constraints renamed onto the unfolding's variables."""
    m = {X: pattern.src.var, X_END: pattern.tgt.var, Y: u.edge, pdef.path: pattern.path}
    if isinstance(u, StepUnfolding):
        m.update({X_MID: u.mid.var, pdef.subpath: u.path})
        return tuple(apply_substitution(f, m) for f in pdef.delta_step)
    return tuple(apply_substitution(f, m) for f in pdef.delta_edge)


# -- constraints of a concrete path --------------------------------------------

def head_constraints(pdef: PropertyDef, path: GraphPath, i: int, graph: PropertyGraph) -> tuple:
    """Grounded contribution of edge ``i`` (0-based): the step set, or the edge set for the last edge."""
    here = path.suffix(i, graph)
    e = path.edges[i]
    m = {X: Elem(graph.src[e], NODE), X_END: Elem(path.target, NODE), Y: Elem(e, EDGE), pdef.path: here}
    if i == len(path.edges) - 1:
        cases = pdef.delta_edge
    else:
        m.update({X_MID: Elem(graph.tgt[e], NODE), pdef.subpath: path.suffix(i + 1, graph)})
        cases = pdef.delta_step
    return tuple(ground_props(apply_substitution(f, m), graph) for f in cases)


def constr_path(pdef: PropertyDef, path: GraphPath, graph: PropertyGraph) -> tuple:
    """Constraints of a concrete path: a step set per edge but the last, then the edge set.

    Suffixes serve as their own keys, so equal inputs give equal outputs.
    """
    if not graph.validate_path(path):
        raise ValueError(f"not a path of the graph: {path}")
    out = []
    for i in range(len(path.edges)):
        out.extend(head_constraints(pdef, path, i, graph))
    return tuple(out)


def path_store(pdef: PropertyDef, path: GraphPath, graph: PropertyGraph) -> ConstraintStore:
    return pdef.new_store().add_all(constr_path(pdef, path, graph))


def path_values(pdef: PropertyDef, path: GraphPath, graph: PropertyGraph) -> dict:
    """Entailed value per property (None where not determined); empty if inconsistent."""
    s = path_store(pdef, path, graph)
    if not s.consistent:
        return {}
    return {pr: s.entailed_value(Prop(path, pr)) for pr in pdef.props}
