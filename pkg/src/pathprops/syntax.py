"""Concrete syntax for queries and property definitions, with printers.

Query::

    match (x1:TrainSt) where x1.loc == "Barcelona"
    match (x1:TrainSt) -[y:byTrain]-> (x2:Airport) where x2.loc == "Barcelona"
    match (x2:Airport) =[p:Flight+]=> (x3:Airport)
        where x3.loc == "Los Angeles", p.cost < 1000, p.length <= 3

Definitions::

    properties length:int, cost, start on p;
    case edge: p.length == 1, p.cost == y.price, p.start == y.dep;
    case step: p.length == 1 + p'.length, p.cost == y.price + p'.cost,
               p.start == y.dep, p'.length > 0, p'.cost > 0,
               p'.start > y.arr + 90;

Filters: atoms ``t1 op t2`` with op in ``== != < <= > >=`` (also ``≠ ≤ ≥``),
joined by ``,`` or ``and``, ``or``, ``not``, parentheses. Terms use ``+ - *``
(also ``− ×``), integers, decimals, ``a/b`` fractions, clock times ``9:00``
(minutes since midnight), double-quoted strings, ``true``/``false``.
Regexes inside ``=[p:...]=>`` use ``|`` for union, postfix ``+``/``*``,
``.`` or juxtaposition for concatenation.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .graph import parse_clock
from .properties import X, X_END, X_MID, Y, PropertyDef
from .query import Clause, EdgePattern, NodePattern, PathPattern, Query
from .regex import RegexError, parse_regex
from .regex import to_text as regex_text
from .terms import (
    EDGE,
    NODE,
    PATH,
    VALUE,
    And,
    Atom,
    Lit,
    Not,
    Op,
    Or,
    Prop,
    Var,
    term_text,
    to_text,
)

GRAMMAR = __doc__


class SyntaxProblem(ValueError):
    """A parse or validation error carrying a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message, self.line, self.col = message, line, col
        super().__init__(f"{line}:{col}: {message}" if line else message)


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<clock>\d+:\d\d(?![0-9]))
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*'*)
  | (?P<op>=\[|\]=>|-\[|\]->|==|!=|<=|>=|[<>≠≤≥+\-−*×/(),;:.|\]])
    """,
    re.VERBOSE,
)

_PRED = {"==": "==", "!=": "!=", "≠": "!=", "<": "<", "<=": "<=", "≤": "<=", ">": ">", ">=": ">=", "≥": ">="}
_KEYWORDS = {"match", "where", "and", "or", "not", "true", "false", "properties", "on", "case"}


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise self._error(f"unexpected character {text[pos]!r}", pos)
            if m.lastgroup != "ws":
                self.toks.append(_Tok(m.lastgroup, m.group(), pos))
            pos = m.end()
        self.toks.append(_Tok("eof", "", len(text)))
        self.i = 0

    def _where(self, pos):
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def _error(self, msg, pos=None):
        if pos is None:
            pos = self.peek().pos
        return SyntaxProblem(msg, *self._where(pos))

    def peek(self, k=0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Tok:
        t = self.peek()
        self.i += 1
        return t

    def at(self, text) -> bool:
        t = self.peek()
        return t.kind in ("op", "id") and t.text == text

    def accept(self, text) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text) -> _Tok:
        if not self.at(text):
            got = self.peek().text or "end of input"
            raise self._error(f"expected {text!r}, found {got!r}")
        return self.next()

    def ident(self, what="identifier") -> _Tok:
        t = self.peek()
        if t.kind != "id" or t.text in _KEYWORDS:
            raise self._error(f"expected {what}, found {t.text or 'end of input'!r}")
        return self.next()

    # -- filters -----------------------------------------------------------

    def filter_list(self, stop) -> list:
        """Comma-separated filters up to (not including) a token satisfying ``stop``."""
        out = []
        if stop():
            return out
        out.append(self.disj())
        while self.accept(","):
            out.append(self.disj())
        return out

    def disj(self):
        parts = [self.conj()]
        while self.accept("or"):
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self):
        parts = [self.unary()]
        while self.accept("and"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self):
        if self.accept("not"):
            return Not(self.unary())
        save = self.i
        try:
            return self.atom()
        except SyntaxProblem as first:
            self.i = save
            if self.accept("("):
                inner = self.filter_list(lambda: self.at(")"))
                self.expect(")")
                if len(inner) == 1:
                    return inner[0]
                return And(tuple(inner))
            if self.accept("true"):
                return And(())
            if self.accept("false"):
                return Or(())
            raise first

    def atom(self):
        left = self.term()
        t = self.peek()
        if t.kind != "op" or t.text not in _PRED:
            raise self._error(f"expected a comparison, found {t.text or 'end of input'!r}")
        self.next()
        return Atom(_PRED[t.text], left, self.term())

    def term(self):
        acc = self.prod()
        while self.peek().kind == "op" and self.peek().text in ("+", "-", "−"):
            op = "+" if self.next().text == "+" else "-"
            acc = Op(op, (acc, self.prod()))
        return acc

    def prod(self):
        acc = self.factor()
        while self.peek().kind == "op" and self.peek().text in ("*", "×"):
            self.next()
            acc = Op("*", (acc, self.factor()))
        return acc

    def factor(self):
        t = self.peek()
        if t.kind == "op" and t.text in ("-", "−"):
            self.next()
            inner = self.factor()
            if isinstance(inner, Lit) and not isinstance(inner.value, (str, bool)):
                return Lit(-inner.value)
            return Op("-", (Lit(0), inner))
        if self.accept("("):
            inner = self.term()
            self.expect(")")
            return inner
        if t.kind == "num":
            self.next()
            v = _number(t.text)
            if self.accept("/"):
                d = self.next()
                if d.kind != "num":
                    raise self._error("expected a number after '/'", d.pos)
                v = Fraction(v) / _number(d.text)
                v = int(v) if v.denominator == 1 else v
            return Lit(v)
        if t.kind == "clock":
            self.next()
            return Lit(parse_clock(t.text))
        if t.kind == "str":
            self.next()
            return Lit(_unquote(t.text))
        if t.kind == "id" and t.text in ("true", "false"):
            self.next()
            return Lit(t.text == "true")
        if t.kind == "id" and t.text not in _KEYWORDS:
            self.next()
            if self.accept("."):
                key = self.ident("property name")
                return Prop(_Name(t.text, t.pos), key.text)
            return _Name(t.text, t.pos)
        raise self._error(f"expected a term, found {t.text or 'end of input'!r}")


@dataclass(frozen=True)
class _Name:
    """Unresolved identifier; replaced by a typed variable after parsing."""

    name: str
    pos: int


def _number(text):
    if "." in text:
        v = Fraction(text)
        return int(v) if v.denominator == 1 else v
    return int(text)


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


def _resolve(f, lookup):
    """Replace ``_Name`` placeholders using ``lookup(name, pos, as_subject)``."""

    def term(t):
        if isinstance(t, _Name):
            return lookup(t, False)
        if isinstance(t, Prop) and isinstance(t.subject, _Name):
            return Prop(lookup(t.subject, True), t.key)
        if isinstance(t, Op):
            return Op(t.op, tuple(term(a) for a in t.args))
        return t

    if isinstance(f, Atom):
        return Atom(f.pred, term(f.left), term(f.right))
    if isinstance(f, And):
        return And(tuple(_resolve(p, lookup) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(_resolve(p, lookup) for p in f.parts))
    if isinstance(f, Not):
        return Not(_resolve(f.arg, lookup))
    raise TypeError(f)


# -- definitions ----------------------------------------------------------------

def parse_defs(text: str) -> PropertyDef:
    ps = _Parser(text)
    ps.expect("properties")
    props, ints = [], set()
    if not ps.at("on"):
        while True:
            name = ps.ident("property name").text
            if ps.accept(":"):
                sort = ps.ident("sort")
                if sort.text not in ("int", "num"):
                    raise ps._error(f"unknown sort {sort.text!r}", sort.pos)
                if sort.text == "int":
                    ints.add(name)
            if name in props:
                raise ps._error(f"property {name} declared twice")
            props.append(name)
            if not ps.accept(","):
                break
    ps.expect("on")
    pathvar = ps.ident("path variable").text
    if pathvar.endswith("'"):
        raise ps._error("the unfolded path variable cannot end with a prime")
    ps.expect(";")
    reserved = {
        "x": X, "x'": X_END, "x''": X_MID, "y": Y,
        pathvar: Var(pathvar, PATH), pathvar + "'": Var(pathvar + "'", PATH),
    }
    cases = {}
    while not ps.peek().kind == "eof":
        ps.expect("case")
        which = ps.ident("'edge' or 'step'")
        if which.text not in ("edge", "step") or which.text in cases:
            raise ps._error(f"expected a new 'edge' or 'step' case, found {which.text!r}", which.pos)
        ps.expect(":")
        body = ps.filter_list(lambda: ps.at(";"))
        ps.expect(";")
        allowed = set(reserved) - ({"x''", pathvar + "'"} if which.text == "edge" else set())

        def lookup(n: _Name, subject: bool, allowed=allowed):
            if n.name not in allowed:
                raise SyntaxProblem(f"unknown reserved variable {n.name}", *ps._where(n.pos))
            return reserved[n.name]

        resolved = []
        for f in body:
            g = _resolve(f, lookup)
            _check_props(g, {reserved[pathvar], reserved[pathvar + "'"]}, props, ps)
            resolved.append(g)
        cases[which.text] = tuple(resolved)
    return PropertyDef(tuple(props), pathvar, cases.get("edge", ()), cases.get("step", ()), frozenset(ints))


def _check_props(f, paths, props, ps):
    from .terms import filter_props

    for pr in filter_props(f):
        if pr.subject in paths and pr.key not in props:
            raise ps._error(f"property {pr.key} is not declared")


def defs_to_text(d: PropertyDef) -> str:
    names = ", ".join(p + (":int" if p in d.integer_props else "") for p in d.props)
    head = f"properties {names} on {d.pathvar};" if names else f"properties on {d.pathvar};"
    edge = ", ".join(to_text(f) for f in d.delta_edge)
    step = ", ".join(to_text(f) for f in d.delta_step)
    return f"{head}\ncase edge: {edge};\ncase step: {step};\n"


# -- queries ----------------------------------------------------------------------

@dataclass(frozen=True)
class QueryDocument:
    query: Query
    defs_ref: Optional[str] = None


def parse_query(text: str) -> Query:
    return parse_query_document(text).query


def parse_query_document(text: str) -> QueryDocument:
    """Parse ``match`` clauses; an optional leading ``using "file";`` names a definitions file."""
    ps = _Parser(text)
    defs_ref = None
    if ps.at("using"):
        ps.next()
        t = ps.next()
        if t.kind != "str":
            raise ps._error("expected a quoted file name", t.pos)
        defs_ref = _unquote(t.text)
        ps.expect(";")
    raw = []
    kinds = {}

    def declare(tok: _Tok, kind: str):
        old = kinds.setdefault(tok.text, kind)
        if old != kind:
            raise SyntaxProblem(f"variable {tok.text} used as both {old} and {kind}", *ps._where(tok.pos))
        if tok.text.startswith("_"):
            raise SyntaxProblem(f"names starting with '_' are reserved: {tok.text}", *ps._where(tok.pos))
        return Var(tok.text, kind)

    def node():
        ps.expect("(")
        v = declare(ps.ident("node variable"), NODE)
        labels = set()
        while ps.accept(":"):
            labels.add(ps.ident("label").text)
        ps.expect(")")
        return NodePattern(v, frozenset(labels))

    if ps.peek().kind == "eof":
        raise ps._error("empty query")
    while ps.peek().kind != "eof":
        ps.expect("match")
        src = node()
        if ps.accept("-["):
            y = declare(ps.ident("edge variable"), EDGE)
            labels = set()
            while ps.accept(":"):
                labels.add(ps.ident("label").text)
            ps.expect("]->")
            pattern = EdgePattern(src, y, frozenset(labels), node())
        elif ps.at("=["):
            ps.next()
            p = declare(ps.ident("path variable"), PATH)
            colon = ps.expect(":")
            start = colon.pos + 1
            end = ps.text.find("]=>", start)
            if end < 0:
                raise ps._error("unterminated path pattern, expected ']=>'")
            try:
                regex = parse_regex(ps.text[start:end])
            except RegexError as e:
                line, col = ps._where(start)
                raise SyntaxProblem(f"bad regular expression: {e}", line, col)
            while ps.peek().pos < end:
                ps.next()
            ps.expect("]=>")
            pattern = PathPattern(src, p, regex, node())
        else:
            pattern = src
        filters = []
        if ps.accept("where"):
            filters = ps.filter_list(lambda: False)
        ps.accept(";")
        raw.append((pattern, filters))

    def lookup(n: _Name, subject: bool):
        kind = kinds.get(n.name)
        if kind is None:
            if subject:
                raise SyntaxProblem(f"unknown variable {n.name}", *ps._where(n.pos))
            if n.name.startswith("_"):
                raise SyntaxProblem(f"names starting with '_' are reserved: {n.name}", *ps._where(n.pos))
            kinds[n.name] = VALUE
            kind = VALUE
        elif not subject and kind != VALUE:
            raise SyntaxProblem(f"{kind} variable {n.name} used as a value", *ps._where(n.pos))
        elif subject and kind == VALUE:
            raise SyntaxProblem(f"value variable {n.name} has no properties", *ps._where(n.pos))
        return Var(n.name, kind)

    clauses = tuple(Clause(p, tuple(_resolve(f, lookup) for f in fs)) for p, fs in raw)
    return QueryDocument(Query(clauses), defs_ref)


def _node_text(n: NodePattern) -> str:
    return "(" + n.var.name + "".join(":" + x for x in sorted(n.labels)) + ")"


def clause_to_text(c: Clause) -> str:
    p = c.pattern
    if isinstance(p, NodePattern):
        head = _node_text(p)
    elif isinstance(p, EdgePattern):
        labels = "".join(":" + x for x in sorted(p.labels))
        head = f"{_node_text(p.src)} -[{p.edge.name}{labels}]-> {_node_text(p.tgt)}"
    else:
        head = f"{_node_text(p.src)} =[{p.path.name}:{regex_text(p.regex)}]=> {_node_text(p.tgt)}"
    text = "match " + head
    if c.filters:
        text += " where " + ", ".join(to_text(f) for f in c.filters)
    return text


def query_to_text(q: Query) -> str:
    return "\n".join(clause_to_text(c) for c in q.clauses) + "\n"


__all__ = [
    "GRAMMAR",
    "QueryDocument",
    "SyntaxProblem",
    "clause_to_text",
    "defs_to_text",
    "parse_defs",
    "parse_query",
    "parse_query_document",
    "query_to_text",
    "term_text",
]
