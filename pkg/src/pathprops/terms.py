"""Terms, atoms and filters over property expressions, plus substitution."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Tuple, Union as TUnion

from .graph import BOTTOM, GraphPath, format_clock, is_numeric

NODE, EDGE, PATH, VALUE = "node", "edge", "path", "value"
PREDICATES = ("==", "!=", "<", "<=", ">", ">=")
NEGATED = {"==": "!=", "!=": "==", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}
FLIPPED = {"==": "==", "!=": "!=", "<": ">", "<=": ">=", ">": "<", ">=": "<="}


class SubstitutionError(TypeError):
    pass


@dataclass(frozen=True)
class Var:
    name: str
    kind: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Elem:
    """A concrete node or edge used as the subject of a property expression."""

    id: str
    kind: str

    def __str__(self):
        return self.id


@dataclass(frozen=True)
class Suffix:
    """The suffix of a data path starting at a position; keys are positional so that
    the constraints of a prefix do not depend on the symbols that follow it."""

    start: int

    def __str__(self):
        return f"w[{self.start}:]"


PATH_KEYS = (GraphPath, Suffix)
Subject = TUnion[Var, Elem, GraphPath, Suffix]


@dataclass(frozen=True)
class Lit:
    value: object

    def __str__(self):
        return _lit_text(self.value)


@dataclass(frozen=True)
class Prop:
    subject: object
    key: str

    def __str__(self):
        return f"{self.subject}.{self.key}"


@dataclass(frozen=True)
class Op:
    op: str  # '+', '-', '*'
    args: tuple

    def __str__(self):
        return "(" + f" {self.op} ".join(map(str, self.args)) + ")"


Term = TUnion[Lit, Var, Prop, Op]


@dataclass(frozen=True)
class Atom:
    pred: str
    left: object
    right: object

    def __str__(self):
        return f"{self.left} {self.pred} {self.right}"


@dataclass(frozen=True)
class And:
    parts: tuple

    def __str__(self):
        return "(" + ", ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class Or:
    parts: tuple

    def __str__(self):
        return "(" + " or ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class Not:
    arg: object

    def __str__(self):
        return f"not {self.arg}"


TRUE = And(())
FALSE = Or(())


def _lit_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


# -- builders ---------------------------------------------------------------

def lit(v) -> Lit:
    return Lit(v)


def add(*args) -> Op:
    return Op("+", tuple(args))


def sub(a, b) -> Op:
    return Op("-", (a, b))


def mul(*args) -> Op:
    return Op("*", tuple(args))


def eq(a, b) -> Atom:
    return Atom("==", a, b)


def conj(filters: Iterable) -> Tuple:
    """Flatten nested conjunctions into a tuple of conjuncts."""
    out = []
    for f in filters:
        if isinstance(f, And):
            out.extend(conj(f.parts))
        else:
            out.append(f)
    return tuple(out)


def negate(f):
    """Push a negation to the atoms."""
    if isinstance(f, Atom):
        return Atom(NEGATED[f.pred], f.left, f.right)
    if isinstance(f, Not):
        return f.arg
    if isinstance(f, And):
        return Or(tuple(negate(p) for p in f.parts))
    if isinstance(f, Or):
        return And(tuple(negate(p) for p in f.parts))
    raise TypeError(f)


# -- traversal --------------------------------------------------------------

def term_vars(t) -> set:
    if isinstance(t, Var):
        return {t}
    if isinstance(t, Prop):
        return {t.subject} if isinstance(t.subject, Var) else set()
    if isinstance(t, Op):
        return set().union(*(term_vars(a) for a in t.args))
    return set()


def filter_vars(f) -> set:
    if isinstance(f, Atom):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, (And, Or)):
        return set().union(*(filter_vars(p) for p in f.parts))
    if isinstance(f, Not):
        return filter_vars(f.arg)
    raise TypeError(f)


def term_props(t) -> set:
    if isinstance(t, Prop):
        return {t}
    if isinstance(t, Op):
        return set().union(*(term_props(a) for a in t.args))
    return set()


def filter_props(f) -> set:
    if isinstance(f, Atom):
        return term_props(f.left) | term_props(f.right)
    if isinstance(f, (And, Or)):
        return set().union(*(filter_props(p) for p in f.parts))
    if isinstance(f, Not):
        return filter_props(f.arg)
    raise TypeError(f)


def map_terms(f, fn):
    """Rebuild a filter applying ``fn`` to every maximal term."""
    if isinstance(f, Atom):
        return Atom(f.pred, fn(f.left), fn(f.right))
    if isinstance(f, And):
        return And(tuple(map_terms(p, fn) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(map_terms(p, fn) for p in f.parts))
    if isinstance(f, Not):
        return Not(map_terms(f.arg, fn))
    raise TypeError(f)


# -- substitution -----------------------------------------------------------

def _check_kind(var: Var, target):
    if isinstance(target, Var):
        ok = target.kind == var.kind
    elif isinstance(target, Elem):
        ok = target.kind == var.kind
    elif isinstance(target, PATH_KEYS):
        ok = var.kind == PATH
    else:
        ok = var.kind == VALUE and (is_numeric(target) or isinstance(target, (str, bool)) or target is BOTTOM)
    if not ok:
        raise SubstitutionError(f"cannot bind {var.kind} variable {var.name} to {target!r}")


def subst_term(t, s: Mapping):
    if isinstance(t, Var):
        if t in s:
            target = s[t]
            _check_kind(t, target)
            if isinstance(target, Var):
                return target
            if isinstance(target, (Elem,) + PATH_KEYS):
                raise SubstitutionError(f"{t.kind} variable {t.name} used as a value")
            return Lit(target)
        return t
    if isinstance(t, Prop):
        subj = t.subject
        if isinstance(subj, Var) and subj in s:
            target = s[subj]
            _check_kind(subj, target)
            return Prop(target, t.key)
        return t
    if isinstance(t, Op):
        return Op(t.op, tuple(subst_term(a, s) for a in t.args))
    return t


def apply_substitution(f, s: Mapping):
    """Replace variables in a filter, a term, or an iterable of filters.

    ``s`` maps ``Var`` objects to variables, ``Elem`` or path-key subjects, or
    plain values. Variables not in ``s`` pass through.
    """
    if not s:
        return f
    if isinstance(f, (Atom, And, Or, Not)):
        return map_terms(f, lambda t: subst_term(t, s))
    if isinstance(f, (Lit, Var, Prop, Op)):
        return subst_term(f, s)
    return type(f)(apply_substitution(x, s) for x in f)


def ground_props(f, graph):
    """Replace properties of concrete nodes/edges by their stored values when present."""

    def fix(t):
        if isinstance(t, Prop) and isinstance(t.subject, Elem):
            v = graph.get_property(t.subject.id, t.key)
            return t if v is None else Lit(v)
        if isinstance(t, Op):
            return Op(t.op, tuple(fix(a) for a in t.args))
        return t

    if isinstance(f, (Lit, Var, Prop, Op)):
        return fix(f)
    return map_terms(f, fix)


def to_text(f, clock_keys=()) -> str:
    """Concrete filter syntax (the query/definition file syntax)."""
    if isinstance(f, Atom):
        return f"{term_text(f.left)} {f.pred} {term_text(f.right)}"
    if isinstance(f, And):
        if not f.parts:
            return "true"
        return "(" + ", ".join(to_text(p) for p in f.parts) + ")"
    if isinstance(f, Or):
        if not f.parts:
            return "false"
        return "(" + " or ".join(to_text(p) for p in f.parts) + ")"
    if isinstance(f, Not):
        return "not " + (to_text(f.arg) if not isinstance(f.arg, Atom) else "(" + to_text(f.arg) + ")")
    raise TypeError(f)


_PREC = {"+": 1, "-": 1, "*": 2}


def term_text(t, ctx: int = 0) -> str:
    if isinstance(t, Lit):
        if is_numeric(t.value) and t.value < 0:
            return f"({_lit_text(t.value)})" if ctx else _lit_text(t.value)
        if isinstance(t.value, Fraction) and t.value.denominator != 1:
            return f"({_lit_text(t.value)})"
        return _lit_text(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Prop):
        return f"{_subject_text(t.subject)}.{t.key}"
    if isinstance(t, Op):
        prec = _PREC[t.op]
        first = term_text(t.args[0], prec)
        # left-associative: right operands at the same level need parens
        rest = [term_text(a, prec + 1) for a in t.args[1:]]
        s = f" {t.op} ".join([first] + rest)
        return f"({s})" if ctx > prec else s
    raise TypeError(t)


def _subject_text(s) -> str:
    if isinstance(s, (Var, Elem)):
        return str(s)
    return str(s)


def clock(v: int) -> str:
    return format_clock(v)
