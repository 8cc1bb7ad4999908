"""Backtracking evaluation of queries by rule application, plus a brute-force reference evaluator.

A state holds the clauses still to solve, the constraint store, the bindings of
node and edge variables, and the partial path bindings ``(path, edges, continuation)``.
Three rules move between states: one matches a node or edge clause, one closes
a path with a final edge, one extends a path by an edge and leaves a
continuation clause for the rest. A successor is kept only if its store has
not been refuted.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .graph import GraphPath, PropertyGraph
from .properties import (
    EMPTY_DEF,
    EdgeUnfolding,
    FreshNames,
    PropertyDef,
    StepUnfolding,
    constr_path,
    constr_pu,
    unfold_pattern,
)
from .query import (
    Answer,
    Clause,
    EdgePattern,
    NodePattern,
    PathPattern,
    Query,
    QueryError,
    edge_fits,
    node_fits,
    path_fits,
)
from .regex import inhabited
from .store import ConstraintStore
from .terms import (
    EDGE,
    NODE,
    PATH,
    Atom,
    Elem,
    Prop,
    Var,
    apply_substitution,
    filter_props,
    filter_vars,
    ground_props,
    to_text,
)

MODES = ("any", "simple", "trail")


class InvariantViolation(AssertionError):
    pass


@dataclass(frozen=True)
class SolveOptions:
    mode: str = "any"
    limit: Optional[int] = None
    depth_cap: Optional[int] = 64
    timeout: Optional[float] = None
    debug: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.limit is not None and self.limit < 0:
            raise ValueError("limit must be nonnegative")


@dataclass(frozen=True)
class Triple:
    """``path ↦ (edges, continuation)``; ``cont`` is None for a closed binding."""

    path: Var
    edges: tuple
    cont: Optional[Var]


@dataclass(frozen=True)
class EngineState:
    remaining: tuple
    psi: ConstraintStore
    bindings: tuple = ()  # sorted (Var, element id)
    paths: frozenset = frozenset()  # Triples
    fresh: int = 0
    pu_counts: tuple = ()  # (path var, ConstrPU constraints contributed), original path variables only

    @property
    def final(self) -> bool:
        return not self.remaining

    def binding_map(self) -> dict:
        return dict(self.bindings)


@dataclass
class SolveStats:
    explored: int = 0  # consistent states reached, the initial one included
    rejected: int = 0  # successor states discarded because the store was refuted
    capped: int = 0  # successors discarded by the depth cap
    answers: int = 0
    duplicates: int = 0
    truncated: bool = False
    elapsed: float = 0.0
    trace: list = field(default_factory=list)


def initial_state(q: Query, pdef: PropertyDef = EMPTY_DEF) -> EngineState:
    """All clauses pending (structural duplicates dropped), empty store and bindings."""
    if not isinstance(q, Query) or not q.clauses:
        raise QueryError("a query needs at least one clause")
    seen, clauses = set(), []
    for c in q.clauses:
        if c not in seen:
            seen.add(c)
            clauses.append(c)
    return EngineState(tuple(clauses), pdef.new_store())


# -- matching helpers ------------------------------------------------------------

def _unify(m: dict, var: Var, value) -> bool:
    old = m.get(var)
    if old is None:
        m[var] = value
        return True
    return old == value


def _link_equations(psi: ConstraintStore, new: dict, g: PropertyGraph) -> list:
    """Equations tying store keys of newly bound variables to the element's properties."""
    out = []
    for k in psi.keys():
        if isinstance(k, Prop) and isinstance(k.subject, Var) and k.subject in new:
            target = Elem(new[k.subject], k.subject.kind)
            out.append(Atom("==", k, ground_props(Prop(target, k.key), g)))
    out.sort(key=lambda a: to_text(a))
    return out


def _ground(filters, m: dict, g: PropertyGraph) -> list:
    s = {v: Elem(x, v.kind) for v, x in m.items()}
    return [ground_props(apply_substitution(f, s), g) for f in filters]


class Engine:
    """Evaluates queries over one graph under one property definition."""

    def __init__(self, graph: PropertyGraph, pdef: PropertyDef = EMPTY_DEF, options: SolveOptions = SolveOptions()):
        self.g = graph
        self.pdef = pdef
        self.opts = options
        self.alphabet = graph.edge_labels()
        self.stats = SolveStats()
        self._deadline = None
        self._local_cache = {}

    # -- rules -------------------------------------------------------------

    def _extend(self, state: EngineState, new: dict, filters, rule: str, clause, remaining, paths, pu=None):
        """Shared tail of all rules: bind, ground, add constraints, check consistency."""
        m = state.binding_map()
        m.update(new)
        psi = state.psi
        added = _link_equations(psi, new, self.g) + _ground(filters, m, self.g)
        psi = psi.add_all(added)
        pu_counts = state.pu_counts
        if pu is not None:
            owner, n = pu
            d = dict(pu_counts)
            d[owner] = d.get(owner, 0) + n
            pu_counts = tuple(sorted(d.items(), key=lambda kv: kv[0].name))
        if not psi.consistent:
            self.stats.rejected += 1
            if self.opts.debug:
                self.stats.trace.append((rule, str(clause), _paths_text(paths), False, to_text(psi.conflict)))
            return None
        out = EngineState(
            remaining,
            psi,
            tuple(sorted(m.items(), key=lambda kv: kv[0].name)),
            paths,
            state.fresh,
            pu_counts,
        )
        if self.opts.debug:
            self.stats.trace.append((rule, str(clause), _paths_text(paths), True, None))
            check_state(out, state, self.g)
        return out

    def _locally_refuted(self, filters, bound: dict, match: dict) -> bool:
        """True if a filter over node/edge variables only, all bound, already fails on its own.

        Such filters reach the store anyway; checking them first spares building the
        unfolding constraints for candidates that cannot survive.
        """
        for f in filters:
            vs = filter_vars(f)
            if not vs or any(v.kind == PATH for v in vs):
                continue
            try:
                key = (f, tuple(sorted(((v.name, match[v] if v in match else bound[v]) for v in vs))))
            except KeyError:
                continue
            ok = self._local_cache.get(key)
            if ok is None:
                m = {v: match.get(v, bound.get(v)) for v in vs}
                ok = self.pdef.new_store().add_all(_ground([f], m, self.g)).consistent
                self._local_cache[key] = ok
            if not ok:
                self.stats.rejected += 1
                return True
        return False

    def apply_R(self, state: EngineState, clause: Clause, match: dict) -> Optional[EngineState]:
        """Solve a node or edge clause with ``match`` (variable → element id)."""
        if clause not in state.remaining:
            raise ValueError("clause is not pending in this state")
        p = clause.pattern
        if not self._fits(p, match, state.binding_map()):
            return None
        rest = tuple(c for c in state.remaining if c != clause)
        return self._extend(state, dict(match), clause.filters, "R", clause, rest, state.paths)

    def _fits(self, p, match, bound) -> bool:
        for v, x in match.items():
            if bound.get(v, x) != x:
                return False
        if isinstance(p, NodePattern):
            x = match.get(p.var)
            return x in self.g.nodes and node_fits(self.g, x, p.labels)
        e = match.get(p.edge)
        if e not in self.g.edges:
            return False
        return (
            edge_fits(self.g, e, p.labels)
            and match.get(p.src.var) == self.g.src[e]
            and match.get(p.tgt.var) == self.g.tgt[e]
            and node_fits(self.g, self.g.src[e], p.src.labels)
            and node_fits(self.g, self.g.tgt[e], p.tgt.labels)
        )

    def _owner(self, state: EngineState, pvar: Var) -> Optional[Triple]:
        for t in state.paths:
            if t.cont == pvar:
                return t
        return None

    def _path_ok(self, edges: tuple, closing: bool) -> bool:
        mode = self.opts.mode
        if mode == "trail" and len(set(edges)) != len(edges):
            return False
        if mode == "simple":
            nodes = [self.g.src[edges[0]]] + [self.g.tgt[e] for e in edges]
            if len(set(nodes)) != len(nodes):
                return False
        cap = self.opts.depth_cap
        if cap is not None and (len(edges) > cap or (not closing and len(edges) >= cap)):
            self.stats.capped += 1
            return False
        return True

    def apply_U1(self, state: EngineState, clause: Clause, u: EdgeUnfolding, match: dict) -> Optional[EngineState]:
        """Close a path clause with a single edge."""
        if clause not in state.remaining:
            raise ValueError("clause is not pending in this state")
        p = clause.pattern
        e = match.get(u.edge)
        bound = state.binding_map()
        if not self._fits(EdgePattern(u.src, u.edge, u.label, u.tgt), match, bound):
            return None
        if self._locally_refuted(clause.filters, bound, match):
            return None
        owner = self._owner(state, p.path)
        if owner is not None:
            edges = owner.edges + (e,)
            paths = (state.paths - {owner}) | {Triple(owner.path, edges, None)}
            root = owner.path
        else:
            edges = (e,)
            paths = state.paths | {Triple(p.path, edges, None)}
            root = p.path
        if not self._path_ok(edges, closing=True):
            return None
        pu = constr_pu(p, u, self.pdef)
        rest = tuple(c for c in state.remaining if c != clause)
        return self._extend(state, dict(match), tuple(clause.filters) + pu, "U1", clause, rest, frozenset(paths), (root, len(pu)))

    def apply_U2(self, state: EngineState, clause: Clause, u: StepUnfolding, match: dict) -> Optional[EngineState]:
        """Extend a path clause by one edge; the clause is replaced by its continuation."""
        if clause not in state.remaining:
            raise ValueError("clause is not pending in this state")
        p = clause.pattern
        e = match.get(u.edge)
        bound = state.binding_map()
        if not self._fits(EdgePattern(u.src, u.edge, u.label, u.mid), match, bound):
            return None
        if self._locally_refuted(clause.filters, bound, match):
            return None
        owner = self._owner(state, p.path)
        if owner is not None:
            edges = owner.edges + (e,)
            paths = (state.paths - {owner}) | {Triple(owner.path, edges, u.path)}
            root = owner.path
        else:
            edges = (e,)
            paths = state.paths | {Triple(p.path, edges, u.path)}
            root = p.path
        if not self._path_ok(edges, closing=False):
            return None
        pu = constr_pu(p, u, self.pdef)
        cont = Clause(u.continuation(), clause.filters)
        rest = tuple(cont if c == clause else c for c in state.remaining)
        return self._extend(state, dict(match), tuple(clause.filters) + pu, "U2", clause, rest, frozenset(paths), (root, len(pu)))

    # -- search ------------------------------------------------------------

    def select(self, state: EngineState) -> Clause:
        """Leftmost clause with the most pattern variables already bound."""
        bound = state.binding_map()
        best, score = None, -1
        for c in state.remaining:
            s = sum(1 for v in c.pattern_vars() if v in bound)
            if s > score:
                best, score = c, s
        return best

    def _edge_candidates(self, src: NodePattern, tgt_var, label, bound):
        g = self.g
        if src.var in bound:
            edges = g.out_edges(bound[src.var])
        elif tgt_var in bound:
            edges = g.in_edges(bound[tgt_var])
        else:
            edges = g.sorted_edges()
        return [e for e in edges if edge_fits(g, e, label)]

    def successors(self, state: EngineState) -> Iterator[EngineState]:
        g = self.g
        clause = self.select(state)
        p = clause.pattern
        bound = state.binding_map()
        if isinstance(p, NodePattern):
            cands = [bound[p.var]] if p.var in bound else (
                sorted(set.intersection(*(set(g.elements_by_label(x)) for x in p.labels)), key=_order)
                if p.labels else g.sorted_nodes()
            )
            for n in cands:
                nxt = self.apply_R(state, clause, {p.var: n})
                if nxt is not None:
                    yield nxt
            return
        if isinstance(p, EdgePattern):
            cands = [bound[p.edge]] if p.edge in bound else self._edge_candidates(p.src, p.tgt.var, p.labels, bound)
            for e in cands:
                m = {p.edge: e}
                if _unify(m, p.src.var, g.src[e]) and _unify(m, p.tgt.var, g.tgt[e]):
                    nxt = self.apply_R(state, clause, m)
                    if nxt is not None:
                        yield nxt
            return
        fresh = FreshNames(state.fresh)
        unfoldings = unfold_pattern(p, self.alphabet, fresh)
        state = EngineState(state.remaining, state.psi, state.bindings, state.paths, fresh.next, state.pu_counts)
        for u in unfoldings:
            end = u.tgt if isinstance(u, EdgeUnfolding) else u.mid
            for e in self._edge_candidates(u.src, end.var if isinstance(u, EdgeUnfolding) else None, u.label, bound):
                m = {u.edge: e}
                if not (_unify(m, u.src.var, g.src[e]) and _unify(m, end.var, g.tgt[e])):
                    continue
                if isinstance(u, EdgeUnfolding):
                    nxt = self.apply_U1(state, clause, u, m)
                else:
                    nxt = self.apply_U2(state, clause, u, m)
                if nxt is not None:
                    yield nxt

    def _timed_out(self) -> bool:
        return self._deadline is not None and time.monotonic() > self._deadline

    def derivations(self, q: Query) -> Iterator[EngineState]:
        """Final states of successful derivations, depth-first, in candidate order."""
        _check_query(q)
        start = initial_state(q, self.pdef)
        self.stats.explored += 1
        stack = [iter([start])]
        first = True
        while stack:
            if self._timed_out():
                self.stats.truncated = True
                return
            try:
                st = next(stack[-1])
            except StopIteration:
                stack.pop()
                continue
            if first:
                first = False
            else:
                self.stats.explored += 1
            if st.final:
                yield st
                continue
            stack.append(self.successors(st))

    def solve(self, q: Query) -> Iterator[Answer]:
        t0 = time.monotonic()
        if self.opts.timeout is not None:
            self._deadline = t0 + self.opts.timeout
        seen = set()
        try:
            if self.opts.limit == 0:
                return
            for st in self.derivations(q):
                ans = computed_answer(st, q, self.g, self.pdef)
                if self.opts.debug:
                    check_final(st, q, self.pdef)
                if ans.bindings in seen:
                    self.stats.duplicates += 1
                    continue
                seen.add(ans.bindings)
                self.stats.answers += 1
                yield ans
                if self.opts.limit is not None and self.stats.answers >= self.opts.limit:
                    return
        finally:
            self.stats.elapsed = time.monotonic() - t0


class AnswerStream:
    """Iterator over answers; ``truncated`` is set if the time limit cut the search short."""

    def __init__(self, engine: Engine, q: Query):
        self.engine = engine
        self._it = engine.solve(q)

    def __iter__(self):
        return self

    def __next__(self) -> Answer:
        return next(self._it)

    @property
    def stats(self) -> SolveStats:
        return self.engine.stats

    @property
    def truncated(self) -> bool:
        return self.engine.stats.truncated


def solve(q: Query, g: PropertyGraph, pdef: PropertyDef = EMPTY_DEF, opts: SolveOptions = SolveOptions()) -> AnswerStream:
    return AnswerStream(Engine(g, pdef, opts), q)


def solve_all(q, g, pdef=EMPTY_DEF, opts=SolveOptions()):
    stream = solve(q, g, pdef, opts)
    return list(stream), stream.stats


def _check_query(q: Query):
    for c in q.clauses:
        if isinstance(c.pattern, PathPattern) and not inhabited(c.pattern.regex):
            raise QueryError(f"path pattern {c.pattern} has an empty language")


def _order(x):
    from .graph import _id_order

    return _id_order(x)


def _paths_text(paths) -> str:
    return "; ".join(
        f"{t.path.name}↦({' '.join(t.edges)}, {t.cont.name if t.cont else 'λ'})"
        for t in sorted(paths, key=lambda t: (t.path.name, t.edges))
    )


# -- answers ------------------------------------------------------------------

def computed_answer(st: EngineState, q: Query, g: PropertyGraph, pdef: PropertyDef) -> Answer:
    m = st.binding_map()
    out = []
    report = []
    for v in sorted(q.variables(), key=lambda v: v.name):
        if v.kind == PATH:
            closed = [t for t in st.paths if t.path == v and t.cont is None]
            edges = closed[0].edges
            out.append((v.name, GraphPath(g.src[edges[0]], edges, g.tgt[edges[-1]])))
            values = {pr: st.psi.entailed_value(Prop(v, pr)) for pr in pdef.props}
            residual = tuple(
                to_text(f) for f in st.psi.residual() if any(k.subject == v for k in filter_props(f))
            )
            report.append((v.name, values, residual))
        else:
            out.append((v.name, m[v]))
    return Answer(tuple(out), tuple(report), st.psi)


# -- invariants ---------------------------------------------------------------

def check_state(st: EngineState, prev: Optional[EngineState], g: PropertyGraph):
    """Consistency of a state plus monotonic growth from its predecessor."""
    if not st.psi.consistent:
        raise InvariantViolation("store refuted in a kept state")
    names = [v for v, _ in st.bindings]
    if len(set(names)) != len(names):
        raise InvariantViolation("a variable is bound twice")
    by_path = {}
    for t in st.paths:
        by_path.setdefault(t.path, []).append(t)
    for ts in by_path.values():
        for a in ts:
            for b in ts:
                if a is b:
                    continue
                if a.cont is not None and b.cont is None and b.edges[: len(a.edges)] != a.edges:
                    raise InvariantViolation(f"open binding {a} is not a prefix of closed {b}")
                if a.cont is not None and b.cont is not None:
                    short, long_ = sorted((a.edges, b.edges), key=len)
                    if long_[: len(short)] != short:
                        raise InvariantViolation(f"open bindings {a} and {b} diverge")
                if a.cont is None and b.cont is None and a.edges != b.edges:
                    raise InvariantViolation(f"closed bindings {a} and {b} differ")
    for t in st.paths:
        for x, y in zip(t.edges, t.edges[1:]):
            if g.tgt[x] != g.src[y]:
                raise InvariantViolation(f"binding {t} does not chain")
    if prev is not None:
        if not set(prev.psi.sources) <= set(st.psi.sources):
            raise InvariantViolation("store lost constraints")
        if not set(prev.bindings) <= set(st.bindings):
            raise InvariantViolation("bindings shrank")
        for t in prev.paths:
            ok = any(u.path == t.path and u.edges[: len(t.edges)] == t.edges for u in st.paths)
            if not ok:
                raise InvariantViolation(f"path binding {t} was not extended")


def check_final(st: EngineState, q: Query, pdef: PropertyDef):
    """Totality of the computed answer and the per-path constraint count."""
    bound = st.binding_map()
    counts = dict(st.pu_counts)
    for v in q.variables():
        if v.kind in (NODE, EDGE):
            if v not in bound:
                raise InvariantViolation(f"{v.name} is unbound in a final state")
        else:
            closed = {t.edges for t in st.paths if t.path == v and t.cont is None}
            opened = [t for t in st.paths if t.path == v and t.cont is not None]
            if len(closed) != 1 or opened:
                raise InvariantViolation(f"{v.name} lacks a unique closed binding")
            n = len(next(iter(closed)))
            uses = sum(1 for c in q.clauses if isinstance(c.pattern, PathPattern) and c.pattern.path == v)
            want = uses * ((n - 1) * len(pdef.delta_step) + len(pdef.delta_edge))
            if counts.get(v, 0) != want:
                raise InvariantViolation(f"{v.name}: {counts.get(v, 0)} unfolding constraints, expected {want}")


# -- reference evaluator --------------------------------------------------------

def enumerate_paths(g: PropertyGraph, start: str, max_len: int, mode: str = "any"):
    """Every path from ``start`` with at most ``max_len`` edges, shortest first per branch."""
    out = []

    def walk(node, edges, nodes):
        for e in g.out_edges(node):
            t = g.tgt[e]
            if mode == "trail" and e in edges:
                continue
            if mode == "simple" and t in nodes:
                continue
            path = edges + (e,)
            out.append(GraphPath(start, path, t))
            if len(path) < max_len:
                walk(t, path, nodes | {t})

    if max_len >= 1:
        walk(start, (), frozenset({start}))
    return out


def cond(clause: Clause, m: dict, g: PropertyGraph, pdef: PropertyDef) -> list:
    """Conditions of a clause under a full match (paths as GraphPath objects)."""
    s = {}
    for v, x in m.items():
        s[v] = x if isinstance(x, GraphPath) else Elem(x, v.kind)
    out = [ground_props(apply_substitution(f, s), g) for f in clause.filters]
    p = clause.pattern
    if isinstance(p, PathPattern):
        out.extend(constr_path(pdef, m[p.path], g))
    return out


def oracle_solve(q: Query, g: PropertyGraph, pdef: PropertyDef = EMPTY_DEF, bound: int = 3, mode: str = "any") -> set:
    """Correct answers with every path at most ``bound`` edges, by enumeration of matches."""
    variables = q.variables()
    results = set()
    clauses = list(q.clauses)

    def matches(c: Clause):
        p = c.pattern
        if isinstance(p, NodePattern):
            for n in g.sorted_nodes():
                if node_fits(g, n, p.labels):
                    yield {p.var: n}
        elif isinstance(p, EdgePattern):
            for e in g.sorted_edges():
                if edge_fits(g, e, p.labels) and node_fits(g, g.src[e], p.src.labels) and node_fits(g, g.tgt[e], p.tgt.labels):
                    mm = {p.edge: e}
                    if _unify(mm, p.src.var, g.src[e]) and _unify(mm, p.tgt.var, g.tgt[e]):
                        yield mm
        else:
            for n in g.sorted_nodes():
                for path in enumerate_paths(g, n, bound, mode):
                    if path_fits(g, p, path):
                        mm = {p.path: path}
                        if _unify(mm, p.src.var, path.source) and _unify(mm, p.tgt.var, path.target):
                            yield mm

    def alone_consistent(c: Clause, mm: dict) -> bool:
        # a subset of a satisfiable set is satisfiable, so this only drops hopeless candidates
        return pdef.new_store().add_all(cond(c, mm, g, pdef)).consistent

    candidates = [[mm for mm in matches(c) if alone_consistent(c, mm)] for c in clauses]

    def join(i: int, m: dict):
        if i == len(clauses):
            store = pdef.new_store()
            for c in clauses:
                store = store.add_all(cond(c, m, g, pdef))
                if not store.consistent:
                    return
            results.add(tuple(sorted(((v.name, m[v]) for v in variables), key=lambda kv: kv[0])))
            return
        for mm in candidates[i]:
            if all(m.get(v, x) == x for v, x in mm.items()):
                join(i + 1, {**m, **mm})

    join(0, {})
    return results


def answer_set(answers) -> set:
    return {a.bindings for a in answers}
