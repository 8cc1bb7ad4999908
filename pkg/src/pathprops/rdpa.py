"""Register automata over data paths and their encoding as data-path property definitions.

A data path alternates data symbols (naturals) and word symbols (strings),
starting and ending with data: ``(5, "a", 3, "b", 5)``.

Conditions are nested lists in prefix form::

    "true" | ["eq", i] | ["ne", i] | ["veq", v] | ["vne", v]
    | ["and", c, ...] | ["or", c, ...] | ["not", c]

``["eq", i]`` holds when register ``i`` (1-based) holds the datum just read;
an unassigned register (``None``) differs from every datum.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Iterator, Optional

from .graph import BOTTOM
from .store import ConstraintStore
from .terms import (
    PATH,
    VALUE,
    And,
    Atom,
    Lit,
    Not,
    Or,
    Prop,
    Suffix,
    Var,
    apply_substitution,
    conj,
    negate,
)


class RdpaError(ValueError):
    pass


class MalformedDataPath(RdpaError):
    pass


def check_data_path(w) -> tuple:
    """Validate alternation; return the path as a tuple."""
    w = tuple(w)
    if len(w) < 3 or len(w) % 2 == 0:
        raise MalformedDataPath(f"a data path has an odd number (at least 3) of positions: {w!r}")
    for i, a in enumerate(w):
        if i % 2 == 0 and not (isinstance(a, int) and not isinstance(a, bool) and a >= 0):
            raise MalformedDataPath(f"position {i} must hold a natural number, got {a!r}")
        if i % 2 == 1 and not isinstance(a, str):
            raise MalformedDataPath(f"position {i} must hold a word symbol, got {a!r}")
    return w


# -- conditions -------------------------------------------------------------------

def condition_holds(c, datum, registers) -> bool:
    if c == "true":
        return True
    op = c[0]
    if op == "eq":
        return registers[c[1] - 1] == datum
    if op == "ne":
        return registers[c[1] - 1] != datum
    if op == "veq":
        return c[1] == datum
    if op == "vne":
        return c[1] != datum
    if op == "and":
        return all(condition_holds(x, datum, registers) for x in c[1:])
    if op == "or":
        return any(condition_holds(x, datum, registers) for x in c[1:])
    if op == "not":
        return not condition_holds(c[1], datum, registers)
    raise RdpaError(f"unknown condition {c!r}")


def _check_condition(c, k):
    if c == "true":
        return
    if not isinstance(c, (list, tuple)) or not c:
        raise RdpaError(f"bad condition {c!r}")
    op = c[0]
    if op in ("eq", "ne"):
        if not (isinstance(c[1], int) and 1 <= c[1] <= k):
            raise RdpaError(f"register index {c[1]!r} out of range 1..{k}")
    elif op in ("veq", "vne"):
        if not isinstance(c[1], int):
            raise RdpaError(f"constant {c[1]!r} is not a natural number")
    elif op in ("and", "or"):
        for x in c[1:]:
            _check_condition(x, k)
    elif op == "not":
        _check_condition(c[1], k)
    else:
        raise RdpaError(f"unknown condition {c!r}")


def _freeze(c):
    return c if isinstance(c, str) else tuple(_freeze(x) if isinstance(x, (list, tuple)) else x for x in c)


# -- automata ---------------------------------------------------------------------

@dataclass(frozen=True)
class Rdpa:
    data_states: tuple
    word_states: tuple
    initial: str
    final: frozenset
    registers: int
    tau0: tuple  # None for unassigned
    word_transitions: tuple  # (word state, symbol, data state)
    data_transitions: tuple  # (data state, condition, frozenset of register indices, word state)

    def __post_init__(self):
        ds, ws = set(self.data_states), set(self.word_states)
        if ds & ws:
            raise RdpaError(f"states in both partitions: {sorted(ds & ws)}")
        if self.initial not in ds:
            raise RdpaError("the initial state must be a data state")
        if not set(self.final) <= ws:
            raise RdpaError("final states must be word states")
        if len(self.tau0) != self.registers:
            raise RdpaError("initial assignment has the wrong number of registers")
        for q, a, r in self.word_transitions:
            if q not in ws or r not in ds or not isinstance(a, str):
                raise RdpaError(f"bad word transition {(q, a, r)}")
        for q, c, regs, r in self.data_transitions:
            if q not in ds or r not in ws:
                raise RdpaError(f"bad data transition {(q, c, r)}")
            if not all(1 <= j <= self.registers for j in regs):
                raise RdpaError(f"register set {sorted(regs)} out of range")
            _check_condition(c, self.registers)

    @classmethod
    def from_doc(cls, doc: dict) -> "Rdpa":
        return cls(
            tuple(doc["data_states"]),
            tuple(doc["word_states"]),
            doc["initial"],
            frozenset(doc.get("final", ())),
            int(doc.get("registers", 0)),
            tuple(doc.get("tau0", ())),
            tuple(tuple(t) for t in doc.get("word_transitions", ())),
            tuple((q, _freeze(c), frozenset(regs), r) for q, c, regs, r in doc.get("data_transitions", ())),
        )

    def to_doc(self) -> dict:
        def thaw(c):
            return c if isinstance(c, str) else [thaw(x) if isinstance(x, tuple) else x for x in c]

        return {
            "data_states": list(self.data_states),
            "word_states": list(self.word_states),
            "initial": self.initial,
            "final": sorted(self.final),
            "registers": self.registers,
            "tau0": list(self.tau0),
            "word_transitions": [list(t) for t in self.word_transitions],
            "data_transitions": [[q, thaw(c), sorted(regs), r] for q, c, regs, r in self.data_transitions],
        }

    def state_index(self) -> dict:
        """Numbering used by the translation: the initial state is 0."""
        rest = sorted((set(self.data_states) | set(self.word_states)) - {self.initial})
        return {q: i for i, q in enumerate([self.initial] + rest)}


def load_automaton(path) -> Rdpa:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return Rdpa.from_doc(doc)
    except json.JSONDecodeError as e:
        raise RdpaError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}")
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, RdpaError):
            raise
        raise RdpaError(f"{path}: malformed automaton document ({type(e).__name__}: {e})")


def accepts(a: Rdpa, w) -> bool:
    """Run the automaton on a data path by tracking the set of reachable configurations.

    A lone datum has no word symbol and is rejected; anything not alternating is an error.
    """
    w = tuple(w)
    if len(w) == 1 and isinstance(w[0], int) and not isinstance(w[0], bool) and w[0] >= 0:
        return False
    w = check_data_path(w)
    configs = {(a.initial, tuple(a.tau0))}
    for i, sym in enumerate(w):
        nxt = set()
        for q, regs in configs:
            if i % 2 == 1:
                nxt |= {(r, regs) for (p, e, r) in a.word_transitions if p == q and e == sym}
            else:
                for p, c, idx, r in a.data_transitions:
                    if p == q and condition_holds(c, sym, regs):
                        new = tuple(sym if j + 1 in idx else v for j, v in enumerate(regs))
                        nxt.add((r, new))
        configs = nxt
        if not configs:
            return False
    return any(q in a.final for q, _ in configs)


def equality_automaton() -> Rdpa:
    """One register holding the first datum; accepts when the last datum equals it."""
    return Rdpa(
        data_states=("d0", "d1"),
        word_states=("w0", "w1"),
        initial="d0",
        final=frozenset({"w1"}),
        registers=1,
        tau0=(None,),
        word_transitions=(("w0", "a", "d1"),),
        data_transitions=(
            ("d0", "true", frozenset({1}), "w0"),
            ("d1", "true", frozenset(), "w0"),
            ("d1", ("eq", 1), frozenset(), "w1"),
        ),
    )


def random_automaton(rng: random.Random, max_states: int = 4, max_registers: int = 2, sigma=("a", "b"), data=range(4)) -> Rdpa:
    nd, nw = rng.randint(1, max_states), rng.randint(1, max_states)
    k = rng.randint(0, max_registers)
    ds = tuple(f"d{i}" for i in range(nd))
    ws = tuple(f"w{i}" for i in range(nw))
    data = list(data)

    def cond(depth=0):
        leaves = [("veq", rng.choice(data)), ("vne", rng.choice(data))]
        if k:
            j = rng.randint(1, k)
            leaves += [("eq", j), ("ne", j)]
        r = rng.random()
        if depth < 2 and r < 0.25:
            return (rng.choice(("and", "or")), cond(depth + 1), cond(depth + 1))
        if depth < 2 and r < 0.35:
            return ("not", cond(depth + 1))
        if r < 0.5:
            return "true"
        return rng.choice(leaves)

    words = {(rng.choice(ws), rng.choice(sigma), rng.choice(ds)) for _ in range(rng.randint(1, 2 * nw + 1))}
    datas = []
    for _ in range(rng.randint(1, 2 * nd + 2)):
        regs = frozenset(j for j in range(1, k + 1) if rng.random() < 0.4)
        datas.append((rng.choice(ds), cond(), regs, rng.choice(ws)))
    final = frozenset(q for q in ws if rng.random() < 0.5) or frozenset({rng.choice(ws)})
    tau0 = tuple(rng.choice(data + [None]) for _ in range(k))
    return Rdpa(ds, ws, "d0", final, k, tau0, tuple(sorted(words)), tuple(datas))


# -- data-path property definitions -------------------------------------------------

SYMBOL = Var("x", VALUE)
WHOLE = Var("w", PATH)


@dataclass(frozen=True)
class DataPathDef:
    """Properties of a data path given by a disjunction of conjunctions for the last
    symbol (``single``) and for a symbol followed by the rest (``step``).

    Constraints mention ``x`` (the symbol), ``p`` and ``p'`` (the path and its tail).
    """

    props: tuple
    single: tuple  # tuple of conjunctions (tuples of filters)
    step: tuple
    integer_props: frozenset = field(default_factory=frozenset)
    pathvar: str = "p"

    @property
    def path(self) -> Var:
        return Var(self.pathvar, PATH)

    @property
    def subpath(self) -> Var:
        return Var(self.pathvar + "'", PATH)

    def new_store(self) -> ConstraintStore:
        return ConstraintStore(self.integer_props)

    def head(self, w, i: int) -> tuple:
        """Grounded disjuncts for position ``i`` of ``w``."""
        return _head_at(self, w[i], i, i == len(w) - 1)


def ground_phi(phi) -> tuple:
    return tuple(apply_substitution(f, {WHOLE: Suffix(0)}) for f in conj(phi))


def length_last_def(zeros: bool = False, sigma=("e",)) -> DataPathDef:
    """Length (number of positions) and last symbol of a data path.

    With ``zeros`` every non-final data symbol must be 0 and every word symbol
    must come from ``sigma``, one disjunct per allowed symbol.
    """
    p, q = Var("p", PATH), Var("p'", PATH)
    single = ((Atom("==", Prop(p, "length"), Lit(1)), Atom("==", Prop(p, "last"), SYMBOL)),)
    base = (
        Atom("==", Prop(p, "length"), _plus1(Prop(q, "length"))),
        Atom("==", Prop(p, "last"), Prop(q, "last")),
        Atom(">", Prop(q, "length"), Lit(0)),
    )
    if zeros:
        step = tuple(base + (Atom("==", SYMBOL, Lit(s)),) for s in (0,) + tuple(sigma))
    else:
        step = (base,)
    return DataPathDef(("length", "last"), single, step, frozenset({"length"}))


def _plus1(t):
    from .terms import Op

    return Op("+", (Lit(1), t))


LAST_IS_LENGTH = (Atom("==", Prop(WHOLE, "last"), Prop(WHOLE, "length")),)


def in_zero_language(w) -> bool:
    """Zeros in every data position but the last, which equals the number of positions."""
    w = check_data_path(w)
    return all(w[i] == 0 for i in range(0, len(w) - 1, 2)) and w[-1] == len(w)


# -- translation ------------------------------------------------------------------

def _dnf(f) -> list:
    """Disjunctive normal form as a list of tuples of atoms."""
    if isinstance(f, Atom):
        return [(f,)]
    if isinstance(f, Not):
        return _dnf(negate(f.arg))
    if isinstance(f, Or):
        out = []
        for p in f.parts:
            out.extend(_dnf(p))
        return out
    if isinstance(f, And):
        out = [()]
        for p in f.parts:
            out = [a + b for a in out for b in _dnf(p)]
        return out
    raise TypeError(f)


def condition_filter(c, path: Var):
    """The condition as a filter over the just-read symbol and the path's registers."""
    if c == "true":
        return And(())
    op = c[0]
    if op == "eq":
        return Atom("==", Prop(path, f"r{c[1]}"), SYMBOL)
    if op == "ne":
        return Atom("!=", Prop(path, f"r{c[1]}"), SYMBOL)
    if op == "veq":
        return Atom("==", Lit(c[1]), SYMBOL)
    if op == "vne":
        return Atom("!=", Lit(c[1]), SYMBOL)
    if op == "and":
        return And(tuple(condition_filter(x, path) for x in c[1:]))
    if op == "or":
        return Or(tuple(condition_filter(x, path) for x in c[1:]))
    if op == "not":
        return Not(condition_filter(c[1], path))
    raise RdpaError(f"unknown condition {c!r}")


def translate(a: Rdpa):
    """Encode the automaton as ``(DataPathDef, phi)``: the state and the registers become
    path properties, each transition one disjunct (split further if its condition has
    several disjuncts). Unassigned registers start at a value unequal to every datum."""
    idx = a.state_index()
    p, q = Var("p", PATH), Var("p'", PATH)
    regs = [f"r{j}" for j in range(1, a.registers + 1)]

    def state(path, s):
        return Atom("==", Prop(path, "state"), Lit(idx[s]))

    step = []
    for s, e, t in a.word_transitions:
        keep = tuple(Atom("==", Prop(q, r), Prop(p, r)) for r in regs)
        step.append((state(p, s), state(q, t), Atom("==", SYMBOL, Lit(e))) + keep)
    single = []
    for s, c, I, t in a.data_transitions:
        for d in _dnf(condition_filter(c, p)):
            sets = tuple(
                Atom("==", Prop(q, f"r{j}"), SYMBOL if j in I else Prop(p, f"r{j}"))
                for j in range(1, a.registers + 1)
            )
            step.append((state(p, s),) + d + (state(q, t),) + sets)
            if t in a.final:
                single.append((state(p, s),) + d)
    pdef = DataPathDef(("state",) + tuple(regs), tuple(single), tuple(step))
    phi = (Atom("==", Prop(WHOLE, "state"), Lit(0)),) + tuple(
        Atom("==", Prop(WHOLE, r), Lit(BOTTOM if v is None else v)) for r, v in zip(regs, a.tau0)
    )
    return pdef, phi


# -- recognition --------------------------------------------------------------------

def _cross(branches, disjuncts, merge: bool, frontier: Optional[Suffix], props) -> list:
    out, seen = [], set()
    for s in branches:
        for d in disjuncts:
            t = s.add_all(d)
            if not t.consistent:
                continue
            if merge and frontier is not None:
                sig = tuple(t.entailed_value(Prop(frontier, pr)) for pr in props)
                if None not in sig:
                    if sig in seen:
                        continue
                    seen.add(sig)
            out.append(t)
    return out


def data_constr(pdef: DataPathDef, w, phi=(), merge: bool = False) -> list:
    """Consistent branches, one store per surviving choice of disjuncts, built left to right.

    With ``merge`` two branches whose tail properties are all determined and equal
    are kept once; later positions only see the tail, so the verdict is unchanged.
    """
    w = tuple(w)
    if not w:
        raise MalformedDataPath("empty data path")
    branches = [pdef.new_store().add_all(ground_phi(phi))]
    branches = [b for b in branches if b.consistent]
    for i in range(len(w)):
        last = i == len(w) - 1
        branches = _cross(branches, pdef.head(w, i), merge, None if last else Suffix(i + 1), pdef.props)
        if not branches:
            break
    return branches


def recognized(pdef: DataPathDef, phi, w, merge: bool = True) -> bool:
    if any(isinstance(f, Or) and not f.parts for f in conj(phi)):
        return False
    return bool(data_constr(pdef, w, phi, merge))


def flat_satisfiable(pdef: DataPathDef, phi, w) -> bool:
    """Reference check without eager pruning: try every combination of disjuncts."""
    w = tuple(w)
    choices = [pdef.head(w, i) for i in range(len(w))]
    base = ground_phi(phi)
    for combo in product(*choices):
        s = pdef.new_store().add_all(base)
        for d in combo:
            s = s.add_all(d)
            if not s.consistent:
                break
        if s.consistent:
            return True
    return False


def data_paths(sigma, data, max_positions: int, min_positions: int = 3) -> Iterator[tuple]:
    """All data paths between the given sizes, in length-then-lexicographic order."""
    sigma, data = list(sigma), list(data)
    for n in range(min_positions, max_positions + 1):
        if n % 2 == 0:
            continue
        for combo in product(*([data if i % 2 == 0 else sigma for i in range(n)])):
            yield combo


def recognized_paths(pdef: DataPathDef, phi, sigma, data, max_positions: int, min_positions: int = 3, merge: bool = True) -> set:
    """Every recognized data path up to ``max_positions``, by depth-first search over prefixes.

    A prefix whose branch set is empty is dropped with all its extensions: the
    branch sets of an extension are built from those of its prefix.
    """
    sigma, data = list(sigma), list(data)
    found = set()
    start = [b for b in [pdef.new_store().add_all(ground_phi(phi))] if b.consistent]
    if not start:
        return found

    def visit(prefix: tuple, branches: list):
        # branches: every position of ``prefix`` processed as a non-final symbol
        i = len(prefix)
        for a in (data if i % 2 == 0 else sigma):
            w = prefix + (a,)
            n = len(w)
            if i % 2 == 0 and n >= min_positions and n <= max_positions:
                if _cross(branches, _head_at(pdef, a, i, True), False, None, pdef.props):
                    found.add(w)
            if n < max_positions:
                nxt = _cross(branches, _head_at(pdef, a, i, False), merge, Suffix(i + 1), pdef.props)
                if nxt:
                    visit(w, nxt)

    visit((), start)
    return found


def _head_at(pdef: DataPathDef, a, i: int, last: bool) -> tuple:
    m = {SYMBOL: a, pdef.path: Suffix(i)}
    if not last:
        m[pdef.subpath] = Suffix(i + 1)
    cases = pdef.single if last else pdef.step
    return tuple(tuple(apply_substitution(f, m) for f in d) for d in cases)


def check_translation(a: Rdpa, sigma=None, data=range(4), max_positions: int = 7) -> list:
    """Data paths on which the automaton and its translation disagree."""
    sigma = sorted({e for _, e, _ in a.word_transitions}) if sigma is None else list(sigma)
    if not sigma:
        sigma = ["a"]
    pdef, phi = translate(a)
    rec = recognized_paths(pdef, phi, sigma, data, max_positions)
    acc = {w for w in data_paths(sigma, data, max_positions) if accepts(a, w)}
    return sorted(rec ^ acc, key=lambda w: (len(w), w))
