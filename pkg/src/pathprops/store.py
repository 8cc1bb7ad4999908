"""Incremental partial constraint solver.

The store keeps linear equalities in triangular solved form, single-variable
inequalities as bounds (tightened for integer-sorted keys), multi-variable
inequalities checked by a capped Fourier-Motzkin projection, disequalities as
exclusion points, and equality classes for keys bound to non-numeric values.
Anything it cannot reduce (nonlinear products, disjunctions with several live
branches) is suspended and retried whenever the solved form grows.

Stores are values: ``add`` returns a new store and never mutates its receiver.
A store whose ``consistent`` flag is set has not been refuted; it is not a
proof of satisfiability.
"""
from __future__ import annotations

from fractions import Fraction
from math import ceil, floor, gcd
from typing import Iterable, Optional

from .graph import is_numeric, normalize_number, values_equal
from .terms import (
    PATH,
    And,
    Atom,
    PATH_KEYS,
    Lit,
    Not,
    Op,
    Or,
    Prop,
    Var,
    conj,
    negate,
)

FM_CAP = 400
BOUND_ROUNDS = 4


class StoreError(RuntimeError):
    """Raised when a caller keeps adding to a refuted store."""


class _Refuted(Exception):
    pass


class _NonLinear(Exception):
    pass


class _IllTyped(Exception):
    pass


class _Rebuilt(Exception):
    pass


# -- linear expressions ---------------------------------------------------
# A linear expression is a pair (const, {key: coeff}) with no zero coeffs.

def _lin(const=0, coeffs=None):
    return (Fraction(const), dict(coeffs or {}))


def _lin_key(k):
    return (Fraction(0), {k: Fraction(1)})


def _ladd(a, b, scale=1):
    c = dict(a[1])
    for k, v in b[1].items():
        nv = c.get(k, 0) + scale * v
        if nv:
            c[k] = nv
        else:
            c.pop(k, None)
    return (a[0] + scale * b[0], c)


def _lscale(a, s):
    if not s:
        return (Fraction(0), {})
    return (a[0] * s, {k: v * s for k, v in a[1].items()})


def _lsubst(a, sol):
    if not any(k in sol for k in a[1]):
        return a
    out = (a[0], {})
    for k, v in a[1].items():
        if k in sol:
            out = _ladd(out, sol[k], v)
        else:
            out = _ladd(out, _lin_key(k), v)
    return out


def key_rank(k):
    """Deterministic order used for pivoting: path properties first."""
    subj = k.subject if isinstance(k, Prop) else None
    if isinstance(subj, PATH_KEYS) or (isinstance(subj, Var) and subj.kind == PATH):
        rank = 0
    elif isinstance(subj, Var) or isinstance(k, Var):
        rank = 1
    else:
        rank = 2
    return (rank, _describe(k))


def _describe(k) -> str:
    if isinstance(k, Prop):
        return f"{k.subject}.{k.key}"
    return str(k)


def _is_key(t) -> bool:
    return isinstance(t, (Prop, Var))


def _lin_to_term(coeffs: dict):
    """Render Σ c·k as a term (keys in pivot order)."""
    acc = None
    for k in sorted(coeffs, key=key_rank):
        c = coeffs[k]
        mag = abs(c)
        t = k if mag == 1 else Op("*", (Lit(normalize_number(mag)), k))
        if acc is None:
            acc = t if c > 0 else Op("-", (Lit(0), t))
        else:
            acc = Op("+" if c > 0 else "-", (acc, t))
    return acc


def _cmp(pred, a, b) -> bool:
    if pred == "==":
        return values_equal(a, b)
    if pred == "!=":
        return not values_equal(a, b)
    if not (is_numeric(a) and is_numeric(b)):
        raise _IllTyped(f"{a!r} {pred} {b!r}")
    return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[pred]


class ConstraintStore:
    """See module docstring. ``integer_props`` names property keys of integer sort."""

    def __init__(self, integer_props: Iterable[str] = ()):
        self.integer_props = frozenset(integer_props)
        self.consistent = True
        self.conflict = None
        self._sources = ()
        self._seen = frozenset()
        self._nonnum = frozenset()
        self._numkeys = frozenset()
        self._parent = {}
        self._vals = {}
        self._nn_diseqs = []
        self._sol = {}
        self._lo = {}
        self._hi = {}
        self._ineqs = []
        self._diseqs = []
        self._excl = {}
        self._suspended = []

    # -- public API --------------------------------------------------------

    def add(self, f) -> "ConstraintStore":
        if not self.consistent:
            raise StoreError("store is inconsistent")
        parts = [p for p in conj((f,)) if p not in self._seen]
        if not parts:
            return self
        s = self._copy()
        for p in parts:
            s._sources = s._sources + (p,)
            s._seen = s._seen | {p}
            try:
                try:
                    s._process(p)
                except _Rebuilt:
                    pass
                s._wake()
            except _Refuted as e:
                s.consistent = False
                s.conflict = e.args[0] if e.args else p
                break
        return s

    def add_all(self, fs) -> "ConstraintStore":
        s = self
        for f in fs:
            s = s.add(f)
            if not s.consistent:
                break
        return s

    @property
    def sources(self) -> tuple:
        return self._sources

    def is_integer_key(self, k) -> bool:
        return isinstance(k, Prop) and k.key in self.integer_props

    def entailed_value(self, key) -> Optional[object]:
        if not self.consistent:
            raise StoreError("store is inconsistent")
        if key in self._nonnum:
            return self._vals.get(self._find(key))
        expr = self._sol.get(key)
        if expr is not None and not expr[1]:
            return normalize_number(expr[0])
        return None

    def keys(self) -> set:
        out = set(self._sol) | set(self._lo) | set(self._hi) | set(self._nonnum) | set(self._excl)
        for L, _ in self._ineqs:
            out |= set(L[1])
        for L in self._diseqs:
            out |= set(L[1])
        for expr in self._sol.values():
            out |= set(expr[1])
        from .terms import filter_props  # local: avoids a cycle at import time

        for f in self._suspended:
            out |= filter_props(f)
        for a, b in self._nn_diseqs:
            out |= {x for x in (a, b) if _is_key(x)}
        return out

    def residual(self) -> list:
        """Suspended constraints plus everything not reduced to a ground value."""
        if not self.consistent:
            raise StoreError("store is inconsistent")
        out = []
        for k, (c, coeffs) in self._sol.items():
            if coeffs:
                left = _lin_to_term({k: Fraction(1), **{kk: -v for kk, v in coeffs.items()}})
                out.append(Atom("==", left, Lit(normalize_number(c))))
        for k, (v, strict) in self._lo.items():
            out.append(Atom(">" if strict else ">=", k, Lit(normalize_number(v))))
        for k, (v, strict) in self._hi.items():
            out.append(Atom("<" if strict else "<=", k, Lit(normalize_number(v))))
        for L, strict in self._ineqs:
            out.append(Atom(">" if strict else ">=", _lin_to_term(L[1]), Lit(normalize_number(-L[0]))))
        for L in self._diseqs:
            out.append(Atom("!=", _lin_to_term(L[1]), Lit(normalize_number(-L[0]))))
        for k, pts in self._excl.items():
            for v in sorted(pts):
                out.append(Atom("!=", k, Lit(normalize_number(v))))
        for a, b in self._nn_diseqs:
            out.append(Atom("!=", a if _is_key(a) else Lit(a[1]), b if _is_key(b) else Lit(b[1])))
        out.extend(self._suspended)
        return out

    def __repr__(self):
        if not self.consistent:
            return f"<ConstraintStore inconsistent: {self.conflict}>"
        return f"<ConstraintStore {len(self._sources)} constraints>"

    # -- copying -------------------------------------------------------------

    def _copy(self) -> "ConstraintStore":
        s = ConstraintStore.__new__(ConstraintStore)
        s.integer_props = self.integer_props
        s.consistent = self.consistent
        s.conflict = self.conflict
        s._sources = self._sources
        s._seen = self._seen
        s._nonnum = self._nonnum
        s._numkeys = self._numkeys
        s._parent = dict(self._parent)
        s._vals = dict(self._vals)
        s._nn_diseqs = list(self._nn_diseqs)
        s._sol = dict(self._sol)
        s._lo = dict(self._lo)
        s._hi = dict(self._hi)
        s._ineqs = list(self._ineqs)
        s._diseqs = list(self._diseqs)
        s._excl = {k: set(v) for k, v in self._excl.items()}
        s._suspended = list(self._suspended)
        return s

    def _trial(self, f) -> bool:
        s = self._copy()
        try:
            try:
                s._process(f)
            except _Rebuilt:
                pass
            s._wake()
        except _Refuted:
            return False
        return True

    # -- dispatch ------------------------------------------------------------

    def _process(self, f):
        if isinstance(f, And):
            for p in f.parts:
                self._process(p)
        elif isinstance(f, Not):
            self._process(negate(f.arg))
        elif isinstance(f, Or):
            self._disjunction(f)
        elif isinstance(f, Atom):
            self._atom(f)
        else:
            raise TypeError(f"not a filter: {f!r}")

    def _disjunction(self, f: Or):
        live = [d for d in f.parts if self._trial(d)]
        if not live:
            raise _Refuted(f)
        if len(live) == 1:
            self._process(live[0])
        else:
            self._suspended.append(Or(tuple(live)))

    def _wake(self):
        while self._suspended:
            before = (len(self._sol), len(self._vals), len(self._lo), len(self._hi))
            pending, self._suspended = self._suspended, []
            try:
                for f in pending:
                    self._process(f)
            except _Rebuilt:
                continue
            after = (len(self._sol), len(self._vals), len(self._lo), len(self._hi))
            if after == before:
                break

    # -- atoms ---------------------------------------------------------------

    def _side(self, t):
        """Classify a term: ('val', v) | ('nkey', rep) | ('key', k) | ('lin', L)."""
        if isinstance(t, Lit):
            if is_numeric(t.value):
                return ("lin", _lin(t.value))
            return ("val", t.value)
        if _is_key(t):
            if t in self._nonnum:
                rep = self._find(t)
                if rep in self._vals:
                    return ("val", self._vals[rep])
                return ("nkey", rep)
            return ("key", t)
        return ("lin", self._to_lin(t))

    def _to_lin(self, t):
        if isinstance(t, Lit):
            if not is_numeric(t.value):
                raise _IllTyped(f"arithmetic on {t.value!r}")
            return _lin(t.value)
        if _is_key(t):
            if t in self._nonnum:
                raise _IllTyped(f"arithmetic on non-numeric {t}")
            return _lsubst(_lin_key(t), self._sol)
        if isinstance(t, Op):
            args = [self._to_lin(a) for a in t.args]
            if t.op == "+":
                out = _lin()
                for a in args:
                    out = _ladd(out, a)
                return out
            if t.op == "-":
                if len(args) == 1:
                    return _lscale(args[0], -1)
                out = args[0]
                for a in args[1:]:
                    out = _ladd(out, a, -1)
                return out
            if t.op == "*":
                out = _lin(1)
                for a in args:
                    if not a[1]:
                        out = _lscale(out, a[0])
                    elif not out[1]:
                        out = _lscale(a, out[0])
                    else:
                        raise _NonLinear(t)
                return out
            raise ValueError(f"unknown operator {t.op}")
        raise TypeError(f"not a term: {t!r}")

    def _atom(self, a: Atom):
        try:
            self._atom_inner(a)
        except _IllTyped:
            raise _Refuted(a)
        except _NonLinear:
            self._suspended.append(a)

    def _atom_inner(self, a: Atom):
        pred = a.pred
        simple = pred in ("==", "!=") and all(
            isinstance(t, Lit) or _is_key(t) for t in (a.left, a.right)
        )
        if simple:
            ls, rs = self._side(a.left), self._side(a.right)
            if pred == "==":
                self._simple_eq(a, ls, rs)
            else:
                self._simple_ne(a, ls, rs)
            return
        ls, rs = self._side(a.left), self._side(a.right)
        for kind, _ in (ls, rs):
            if kind in ("val", "nkey"):
                raise _IllTyped(a)
        L = self._as_lin(ls)
        R = self._as_lin(rs)
        self._numkeys = self._numkeys | set(L[1]) | set(R[1]) | _raw_keys(a)
        if pred == "==":
            self._lin_eq(_ladd(L, R, -1), a)
        elif pred == "!=":
            self._lin_ne(_ladd(L, R, -1), a)
        elif pred == ">":
            self._lin_ge(_ladd(L, R, -1), True, a)
        elif pred == ">=":
            self._lin_ge(_ladd(L, R, -1), False, a)
        elif pred == "<":
            self._lin_ge(_ladd(R, L, -1), True, a)
        elif pred == "<=":
            self._lin_ge(_ladd(R, L, -1), False, a)
        else:
            raise ValueError(pred)

    def _as_lin(self, side):
        kind, x = side
        if kind == "lin":
            return x
        return _lsubst(_lin_key(x), self._sol)

    def _simple_eq(self, a, ls, rs):
        kinds = {ls[0], rs[0]}
        if ls[0] == "val" and rs[0] == "val":
            if not values_equal(ls[1], rs[1]):
                raise _Refuted(a)
            return
        if "val" in kinds:
            (vk, v), (ok, o) = (ls, rs) if ls[0] == "val" else (rs, ls)
            if ok == "lin":  # a number against a non-number
                raise _Refuted(a)
            if ok == "nkey":
                self._set_val(o, v, a)
                return
            self._expand_nonnum({o}, a)
            return
        if "nkey" in kinds:
            (_, n), (ok, o) = (ls, rs) if ls[0] == "nkey" else (rs, ls)
            if ok == "lin":
                raise _Refuted(a)
            if ok == "nkey":
                self._union(n, o, a)
                return
            self._expand_nonnum({o}, a)
            return
        self._lin_eq(_ladd(self._as_lin(ls), self._as_lin(rs), -1), a)

    def _simple_ne(self, a, ls, rs):
        if ls[0] == "val" and rs[0] == "val":
            if values_equal(ls[1], rs[1]):
                raise _Refuted(a)
            return
        if ls[0] == "lin" and rs[0] == "val" or ls[0] == "val" and rs[0] == "lin":
            return  # different sorts never coincide
        if "val" in (ls[0], rs[0]) or "nkey" in (ls[0], rs[0]):
            self._nn_diseqs.append((self._nn_side(ls), self._nn_side(rs)))
            self._check_nn_diseqs()
            return
        self._lin_ne(_ladd(self._as_lin(ls), self._as_lin(rs), -1), a)

    @staticmethod
    def _nn_side(side):
        kind, x = side
        if kind == "val":
            return ("val", x)
        if kind == "lin":
            return ("val", normalize_number(x[0])) if not x[1] else ("lin", x)
        return x

    # -- non-numeric equality classes --------------------------------------

    def _find(self, k):
        while self._parent.get(k, k) != k:
            k = self._parent[k]
        return k

    def _set_val(self, rep, v, a):
        old = self._vals.get(rep)
        if old is not None or rep in self._vals:
            if not values_equal(old, v):
                raise _Refuted(a)
            return
        self._vals[rep] = v
        self._check_nn_diseqs()

    def _union(self, r1, r2, a):
        if r1 == r2:
            return
        if key_rank(r2) < key_rank(r1):
            r1, r2 = r2, r1
        v1, v2 = r1 in self._vals, r2 in self._vals
        if v1 and v2 and not values_equal(self._vals[r1], self._vals[r2]):
            raise _Refuted(a)
        self._parent[r2] = r1
        if v2 and not v1:
            self._vals[r1] = self._vals[r2]
        self._vals.pop(r2, None)
        self._check_nn_diseqs()

    def _nn_resolve(self, x):
        if isinstance(x, tuple):
            if x[0] == "val":
                return ("val", x[1])
            L = _lsubst(x[1], self._sol)
            return ("val", normalize_number(L[0])) if not L[1] else ("open", None)
        if x in self._nonnum:
            rep = self._find(x)
            if rep in self._vals:
                return ("val", self._vals[rep])
            return ("rep", rep)
        expr = self._sol.get(x)
        if expr is not None and not expr[1]:
            return ("val", normalize_number(expr[0]))
        return ("open", None)

    def _check_nn_diseqs(self):
        keep = []
        for a, b in self._nn_diseqs:
            ra, rb = self._nn_resolve(a), self._nn_resolve(b)
            if ra[0] == "val" and rb[0] == "val":
                if values_equal(ra[1], rb[1]):
                    raise _Refuted(Atom("!=", a, b))
                continue
            if ra[0] == "rep" and rb[0] == "rep" and ra[1] == rb[1]:
                raise _Refuted(Atom("!=", a, b))
            keep.append((a, b))
        self._nn_diseqs = keep

    def _expand_nonnum(self, new_keys, a):
        """Move keys (and everything aliased to them) to the non-numeric side and replay."""
        alias = {}
        for src in self._sources:
            for f in conj((src,)):
                if (
                    isinstance(f, Atom)
                    and f.pred == "=="
                    and _is_key(f.left)
                    and _is_key(f.right)
                ):
                    alias.setdefault(f.left, set()).add(f.right)
                    alias.setdefault(f.right, set()).add(f.left)
        todo = list(new_keys)
        closed = set(self._nonnum)
        while todo:
            k = todo.pop()
            if k in closed:
                continue
            closed.add(k)
            todo.extend(alias.get(k, ()))
        if closed & self._numkeys:
            raise _Refuted(a)
        fresh = ConstraintStore(self.integer_props)
        fresh._nonnum = frozenset(closed)
        fresh._sources = self._sources
        fresh._seen = self._seen
        try:
            for src in self._sources:
                try:
                    fresh._process(src)
                except _Rebuilt:
                    pass
            fresh._wake()
        except _Refuted:
            raise
        self.__dict__.update(fresh.__dict__)
        raise _Rebuilt()

    # -- linear part -------------------------------------------------------

    def _all_integer(self, coeffs) -> bool:
        return bool(coeffs) and all(self.is_integer_key(k) for k in coeffs)

    def _lin_eq(self, L, a):
        L = _lsubst(L, self._sol)
        c, coeffs = L
        if not coeffs:
            if c != 0:
                raise _Refuted(a)
            return
        if self._all_integer(coeffs):
            scale = _lcm_den(list(coeffs.values()) + [c])
            ints = [int(v * scale) for v in coeffs.values()]
            g = 0
            for v in ints:
                g = gcd(g, v)
            if int(c * scale) % g:
                raise _Refuted(a)
        pivot = min(coeffs, key=key_rank)
        pc = coeffs[pivot]
        rest = (c, {k: v for k, v in coeffs.items() if k != pivot})
        expr = _lscale(rest, -1 / pc)
        if self.is_integer_key(pivot) and not expr[1] and expr[0].denominator != 1:
            raise _Refuted(a)
        # bounds and exclusions on the pivot become constraints over its definition
        lo, hi = self._lo.pop(pivot, None), self._hi.pop(pivot, None)
        excl = self._excl.pop(pivot, set())
        self._sol[pivot] = expr
        sub = {pivot: expr}
        for k in list(self._sol):
            if k != pivot and pivot in self._sol[k][1]:
                self._sol[k] = _lsubst(self._sol[k], sub)
                if self.is_integer_key(k) and not self._sol[k][1] and self._sol[k][0].denominator != 1:
                    raise _Refuted(a)
        ineqs, self._ineqs = self._ineqs, []
        diseqs, self._diseqs = self._diseqs, []
        if lo is not None:
            self._lin_ge(_ladd(expr, _lin(-lo[0])), lo[1], a)
        if hi is not None:
            self._lin_ge(_ladd(_lin(hi[0]), expr, -1), hi[1], a)
        for v in excl:
            self._lin_ne(_ladd(expr, _lin(-v)), a)
        for L2, strict in ineqs:
            self._lin_ge(L2, strict, a, check=False)
        for L2 in diseqs:
            self._lin_ne(L2, a)
        if self._nn_diseqs:
            self._check_nn_diseqs()
        self._fm_check(a)

    def _lin_ne(self, L, a):
        L = _lsubst(L, self._sol)
        c, coeffs = L
        if not coeffs:
            if c == 0:
                raise _Refuted(a)
            return
        if len(coeffs) == 1:
            (k, v), = coeffs.items()
            point = -c / v
            if self.is_integer_key(k) and point.denominator != 1:
                return
            self._excl.setdefault(k, set()).add(point)
            self._check_range(k, a)
            return
        if L not in self._diseqs:
            self._diseqs.append(L)

    def _tighten(self, L, strict):
        """Normalize ``L > 0`` / ``L >= 0`` over integer keys to a non-strict form."""
        c, coeffs = L
        if not self._all_integer(coeffs):
            return L, strict
        scale = _lcm_den(list(coeffs.values()) + [c])
        ints = {k: v * scale for k, v in coeffs.items()}
        c = c * scale
        if strict:
            c -= 1
        g = 0
        for v in ints.values():
            g = gcd(g, int(v))
        return (Fraction(floor(c / g)), {k: v / g for k, v in ints.items()}), False

    def _lin_ge(self, L, strict, a, check=True):
        L = _lsubst(L, self._sol)
        L, strict = self._tighten(L, strict)
        c, coeffs = L
        if not coeffs:
            if c < 0 or (strict and c == 0):
                raise _Refuted(a)
            return
        if len(coeffs) == 1:
            (k, v), = coeffs.items()
            bound = -c / v
            if v > 0:
                self._set_bound(k, bound, strict, True, a)
            else:
                self._set_bound(k, bound, strict, False, a)
            return
        if (L, strict) not in self._ineqs:
            self._ineqs.append((L, strict))
            if check:
                self._fm_check(a)

    def _set_bound(self, k, v, strict, lower, a):
        if self.is_integer_key(k):
            if lower:
                v = Fraction(floor(v) + 1) if strict else Fraction(ceil(v))
            else:
                v = Fraction(ceil(v) - 1) if strict else Fraction(floor(v))
            strict = False
        table = self._lo if lower else self._hi
        old = table.get(k)
        if old is not None:
            if lower and (old[0] > v or (old[0] == v and (old[1] or not strict))):
                return
            if not lower and (old[0] < v or (old[0] == v and (old[1] or not strict))):
                return
        table[k] = (v, strict)
        lo, hi = self._lo.get(k), self._hi.get(k)
        if lo is not None and hi is not None:
            if lo[0] > hi[0] or (lo[0] == hi[0] and (lo[1] or hi[1])):
                raise _Refuted(a)
            if lo[0] == hi[0]:
                self._lin_eq(_ladd(_lin_key(k), _lin(-lo[0])), a)
                return
        self._check_range(k, a)

    def _check_range(self, k, a):
        pts = self._excl.get(k)
        if not pts:
            return
        lo, hi = self._lo.get(k), self._hi.get(k)
        if lo is None or hi is None or not self.is_integer_key(k):
            return
        if hi[0] - lo[0] > 64:
            return
        values = range(int(lo[0]), int(hi[0]) + 1)
        alive = [v for v in values if Fraction(v) not in pts]
        if not alive:
            raise _Refuted(a)
        if len(alive) == 1:
            self._lin_eq(_ladd(_lin_key(k), _lin(-alive[0])), a)

    # -- Fourier-Motzkin ---------------------------------------------------

    def _fm_system(self):
        rows = [(L, s) for L, s in self._ineqs]
        keys = set()
        for L, _ in rows:
            keys |= set(L[1])
        for k in keys:
            if k in self._lo:
                v, s = self._lo[k]
                rows.append(((Fraction(-v), {k: Fraction(1)}), s))
            if k in self._hi:
                v, s = self._hi[k]
                rows.append(((Fraction(v), {k: Fraction(-1)}), s))
        return rows, keys

    def _fm_check(self, a):
        """Refute the multi-variable inequalities, and derive implied bounds."""
        if not self._ineqs:
            return
        rows, keys = self._fm_system()
        if _fm_eliminate(rows, sorted(keys, key=key_rank), self, a) is None:
            return
        # implied bounds: project onto each key in turn
        for _ in range(BOUND_ROUNDS):
            changed = False
            rows, keys = self._fm_system()
            for k in sorted(keys, key=key_rank):
                others = [x for x in sorted(keys, key=key_rank) if x != k]
                proj = _fm_eliminate(rows, others, self, a)
                if proj is None:
                    continue
                for L, strict in proj:
                    if k not in L[1]:
                        continue
                    before = (self._lo.get(k), self._hi.get(k))
                    self._lin_ge(L, strict, a, check=False)
                    if k in self._sol:
                        return self._fm_check(a)
                    if (self._lo.get(k), self._hi.get(k)) != before:
                        changed = True
            if not changed:
                break


def _raw_keys(a: Atom) -> set:
    from .terms import filter_props, filter_vars

    return set(filter_props(a)) | {v for v in filter_vars(a) if isinstance(v, Var) and v.kind == "value"}


def _lcm_den(values) -> int:
    out = 1
    for v in values:
        d = Fraction(v).denominator
        out = out * d // gcd(out, d)
    return out


def _fm_eliminate(rows, order, store, atom):
    """Eliminate ``order`` from ``rows``; refutes via ``_Refuted``.

    Returns the surviving rows, or None when the cap was hit.
    """
    rows = list(rows)
    for k in order:
        pos, neg, rest = [], [], []
        for L, s in rows:
            v = L[1].get(k)
            if v is None:
                rest.append((L, s))
            elif v > 0:
                pos.append((L, s))
            else:
                neg.append((L, s))
        if len(pos) * len(neg) + len(rest) > FM_CAP:
            return None
        for Lp, sp in pos:
            for Ln, sn in neg:
                cp, cn = Lp[1][k], -Ln[1][k]
                comb = _ladd(_lscale(Lp, 1 / cp), _lscale(Ln, 1 / cn))
                comb, strict = store._tighten(comb, sp or sn)
                if not comb[1]:
                    if comb[0] < 0 or (strict and comb[0] == 0):
                        raise _Refuted(atom)
                    continue
                rest.append((comb, strict))
        rows = rest
    for L, s in rows:
        if not L[1] and (L[0] < 0 or (s and L[0] == 0)):
            raise _Refuted(atom)
    return rows


def is_satisfiable(filters, integer_props=()) -> bool:
    """Convenience: add everything to a fresh store and report the verdict."""
    return ConstraintStore(integer_props).add_all(filters).consistent
