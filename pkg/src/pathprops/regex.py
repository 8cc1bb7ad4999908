"""Regular expressions over edge labels, with the empty word excluded.

Languages here are always taken minus the empty word: ``a*`` denotes the same
set as ``a+``. The tree carries two internal constructors, ``EPS`` and
``EMPTY``, which only arise as derivative residues and never from the parser.

Decomposition and equivalence go through Brzozowski derivatives normalised up
to similarity; the plain ``matches`` function is a direct position-set matcher
that shares no code with them, so it can serve as an oracle.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterable, Sequence, Tuple


class RegexError(ValueError):
    pass


class UninhabitedPattern(RegexError):
    pass


class Regex:
    __slots__ = ()

    def __or__(self, other):
        return union(self, other)


@dataclass(frozen=True)
class _Empty(Regex):
    def __repr__(self):
        return "∅"


@dataclass(frozen=True)
class _Eps(Regex):
    def __repr__(self):
        return "ε"


EMPTY = _Empty()
EPS = _Eps()


@dataclass(frozen=True)
class Sym(Regex):
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Star(Regex):
    arg: Regex

    def __repr__(self):
        return f"({self.arg!r})*"


@dataclass(frozen=True)
class Plus(Regex):
    arg: Regex

    def __repr__(self):
        return f"({self.arg!r})+"


@dataclass(frozen=True)
class Union(Regex):
    parts: Tuple[Regex, ...]

    def __repr__(self):
        return "(" + " | ".join(map(repr, self.parts)) + ")"


@dataclass(frozen=True)
class Concat(Regex):
    left: Regex
    right: Regex

    def __repr__(self):
        return f"({self.left!r} . {self.right!r})"


@dataclass(frozen=True)
class Decomposition:
    s0: FrozenSet[str]
    s1: FrozenSet[str]
    rem: Dict[str, Regex]

    def __hash__(self):
        return hash((self.s0, self.s1))


# -- smart constructors (similarity normal form) -----------------------------

def _order(r: Regex):
    return repr(r)


def union(*parts: Regex) -> Regex:
    flat = set()
    for p in parts:
        if isinstance(p, Union):
            flat.update(p.parts)
        elif p is not EMPTY:
            flat.add(p)
    if not flat:
        return EMPTY
    if len(flat) == 1:
        return flat.pop()
    return Union(tuple(sorted(flat, key=_order)))


def concat(left: Regex, right: Regex) -> Regex:
    if left is EMPTY or right is EMPTY:
        return EMPTY
    if left is EPS:
        return right
    if right is EPS:
        return left
    if isinstance(left, Concat):
        return concat(left.left, concat(left.right, right))
    return Concat(left, right)


def star(arg: Regex) -> Regex:
    if arg is EMPTY or arg is EPS:
        return EPS
    if isinstance(arg, (Star, Plus)):
        return Star(arg.arg)
    return Star(arg)


def plus(arg: Regex) -> Regex:
    if arg is EMPTY or arg is EPS:
        return arg
    if isinstance(arg, Plus):
        return arg
    if isinstance(arg, Star):
        return arg
    return Plus(arg)


def seq(*items: Regex) -> Regex:
    out = items[-1]
    for r in reversed(items[:-1]):
        out = concat(r, out)
    return out


def simplify(r: Regex) -> Regex:
    """Rebuild bottom-up through the smart constructors."""
    if isinstance(r, Union):
        return union(*(simplify(p) for p in r.parts))
    if isinstance(r, Concat):
        return concat(simplify(r.left), simplify(r.right))
    if isinstance(r, Star):
        return star(simplify(r.arg))
    if isinstance(r, Plus):
        return plus(simplify(r.arg))
    return r


# -- structural queries -----------------------------------------------------

@lru_cache(maxsize=None)
def nullable(r: Regex) -> bool:
    """Whether the *standard* language contains the empty word."""
    if r is EPS or isinstance(r, Star):
        return True
    if r is EMPTY or isinstance(r, Sym):
        return False
    if isinstance(r, Plus):
        return nullable(r.arg)
    if isinstance(r, Union):
        return any(nullable(p) for p in r.parts)
    if isinstance(r, Concat):
        return nullable(r.left) and nullable(r.right)
    raise TypeError(r)


@lru_cache(maxsize=None)
def inhabited(r: Regex) -> bool:
    """Whether the language contains some nonempty word."""
    if isinstance(r, Sym):
        return True
    if r is EPS or r is EMPTY:
        return False
    if isinstance(r, (Star, Plus)):
        return inhabited(r.arg)
    if isinstance(r, Union):
        return any(inhabited(p) for p in r.parts)
    if isinstance(r, Concat):
        left_any = inhabited(r.left) or nullable(r.left)
        right_any = inhabited(r.right) or nullable(r.right)
        return (inhabited(r.left) and right_any) or (left_any and inhabited(r.right))
    raise TypeError(r)


def symbols(r: Regex) -> FrozenSet[str]:
    if isinstance(r, Sym):
        return frozenset([r.name])
    if isinstance(r, (Star, Plus)):
        return symbols(r.arg)
    if isinstance(r, Union):
        return frozenset().union(*(symbols(p) for p in r.parts))
    if isinstance(r, Concat):
        return symbols(r.left) | symbols(r.right)
    return frozenset()


# -- derivatives ------------------------------------------------------------

@lru_cache(maxsize=None)
def derivative(r: Regex, a: str) -> Regex:
    """Brzozowski derivative, normalised through the smart constructors."""
    if isinstance(r, Sym):
        return EPS if r.name == a else EMPTY
    if r is EPS or r is EMPTY:
        return EMPTY
    if isinstance(r, Union):
        return union(*(derivative(p, a) for p in r.parts))
    if isinstance(r, Concat):
        head = concat(derivative(r.left, a), r.right)
        if nullable(r.left):
            return union(head, derivative(r.right, a))
        return head
    if isinstance(r, Star):
        return concat(derivative(r.arg, a), r)
    if isinstance(r, Plus):
        return concat(derivative(r.arg, a), star(r.arg))
    raise TypeError(r)


def raw_derivative(r: Regex, a: str) -> Regex:
    """Derivative with no normalisation at all (plain constructors)."""
    if isinstance(r, Sym):
        return EPS if r.name == a else EMPTY
    if r is EPS or r is EMPTY:
        return EMPTY
    if isinstance(r, Union):
        return Union(tuple(raw_derivative(p, a) for p in r.parts))
    if isinstance(r, Concat):
        head = Concat(raw_derivative(r.left, a), r.right)
        if nullable(r.left):
            return Union((head, raw_derivative(r.right, a)))
        return head
    if isinstance(r, Star):
        return Concat(raw_derivative(r.arg, a), r)
    if isinstance(r, Plus):
        return Concat(raw_derivative(r.arg, a), Star(r.arg))
    raise TypeError(r)


@lru_cache(maxsize=None)
def _decompose(r: Regex, alphabet: FrozenSet[str], raw: bool) -> Decomposition:
    if not inhabited(r):
        raise UninhabitedPattern(f"uninhabited pattern: {r!r}")
    s0, s1, rem = set(), set(), {}
    for a in sorted(alphabet | symbols(r)):
        d = raw_derivative(r, a) if raw else derivative(r, a)
        if nullable(d):
            s0.add(a)
        if inhabited(d):
            s1.add(a)
            rem[a] = d
    return Decomposition(frozenset(s0), frozenset(s1), rem)


def decompose(r: Regex, alphabet: Iterable[str] = (), raw: bool = False) -> Decomposition:
    """Disjunctive decomposition ``(s0, s1, rem)``.

    ``a in s0`` iff the one-letter word ``a`` is in the language; ``b in s1``
    iff some word of length at least two starts with ``b``, and ``rem[b]`` is
    the derivative by ``b`` (its language minus the empty word is the set of
    continuations).
    """
    return _decompose(r, frozenset(alphabet), raw)


# -- automata built from derivatives ----------------------------------------

def _equiv(a: Regex, b: Regex, alphabet: FrozenSet[str]) -> bool:
    letters = sorted(alphabet | symbols(a) | symbols(b))
    start = (simplify(a), simplify(b))
    seen = {start}
    todo = deque([start])
    while todo:
        x, y = todo.popleft()
        for c in letters:
            nxt = (derivative(x, c), derivative(y, c))
            # acceptance only compared after at least one letter: the empty word is excluded
            if nullable(nxt[0]) != nullable(nxt[1]):
                return False
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return True


def remainder_equiv(a: Regex, b: Regex) -> bool:
    """Language equality (empty word excluded)."""
    return _equiv(a, b, frozenset())


@lru_cache(maxsize=None)
def _universal(r: Regex, alphabet: FrozenSet[str]) -> bool:
    if not alphabet:
        return False
    return _equiv(r, Plus(union(*(Sym(a) for a in alphabet))), alphabet)


def is_universal_plus(r: Regex, alphabet: Iterable[str]) -> bool:
    """Whether the language is every nonempty word over ``alphabet``."""
    return _universal(r, frozenset(alphabet))


def dfa_states(r: Regex, alphabet: Iterable[str] = ()) -> set:
    """Reachable derivative states, for inspection and finiteness checks."""
    letters = sorted(set(alphabet) | symbols(r))
    start = simplify(r)
    seen = {start}
    todo = deque([start])
    while todo:
        x = todo.popleft()
        for c in letters:
            d = derivative(x, c)
            if d not in seen:
                seen.add(d)
                todo.append(d)
    return seen


# -- direct matcher ---------------------------------------------------------

def _ends(r: Regex, word: Sequence, i: int, test: Callable) -> FrozenSet[int]:
    """Positions j such that word[i:j] is in the standard language of r."""
    if isinstance(r, Sym):
        return frozenset([i + 1]) if i < len(word) and test(r.name, word[i]) else frozenset()
    if r is EPS:
        return frozenset([i])
    if r is EMPTY:
        return frozenset()
    if isinstance(r, Union):
        out = set()
        for p in r.parts:
            out |= _ends(p, word, i, test)
        return frozenset(out)
    if isinstance(r, Concat):
        out = set()
        for j in _ends(r.left, word, i, test):
            out |= _ends(r.right, word, j, test)
        return frozenset(out)
    if isinstance(r, (Star, Plus)):
        reached = set() if isinstance(r, Plus) else {i}
        frontier = {i}
        while frontier:
            nxt = set()
            for j in frontier:
                for k in _ends(r.arg, word, j, test):
                    if k not in reached:
                        reached.add(k)
                        if k != j:
                            nxt.add(k)
            frontier = nxt
        return frozenset(reached)
    raise TypeError(r)


def matches(r: Regex, word: Sequence[str]) -> bool:
    """Membership of a nonempty word."""
    if not word:
        return False
    return len(word) in _ends(r, list(word), 0, lambda a, s: a == s)


def matches_label_sets(r: Regex, word: Sequence[FrozenSet[str]]) -> bool:
    """Membership where each position offers a set of admissible symbols."""
    if not word:
        return False
    return len(word) in _ends(r, list(word), 0, lambda a, s: a in s)


# -- concrete syntax --------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[()|.*+]))")


def parse_regex(text: str, offset: int = 0) -> Regex:
    """``Flight+``, ``(Flight | byTrain)+``, ``a . b*``; juxtaposition also concatenates."""
    tokens, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise RegexError(f"unexpected character {text[pos:].lstrip()[:1]!r} at column {offset + pos + 1}")
        tokens.append((m.group("id") or m.group("op"), m.start(m.lastindex) + offset, bool(m.group("id"))))
        pos = m.end()
    toks = tokens + [(None, offset + len(text), False)]
    i = 0

    def peek():
        return toks[i]

    def take(expected=None):
        nonlocal i
        tok = toks[i]
        if expected is not None and tok[0] != expected:
            raise RegexError(f"expected {expected!r} at column {tok[1] + 1}")
        i += 1
        return tok

    def alt():
        parts = [cat()]
        while peek()[0] == "|":
            take()
            parts.append(cat())
        return parts[0] if len(parts) == 1 else Union(tuple(parts))

    def cat():
        items = [post()]
        while True:
            tok = peek()
            if tok[0] == ".":
                take()
                items.append(post())
            elif tok[2] or tok[0] == "(":
                items.append(post())
            else:
                break
        out = items[-1]
        for r in reversed(items[:-1]):
            out = Concat(r, out)
        return out

    def post():
        r = atom()
        while peek()[0] in ("*", "+"):
            r = Star(r) if take()[0] == "*" else Plus(r)
        return r

    def atom():
        tok = peek()
        if tok[2]:
            take()
            return Sym(tok[0])
        if tok[0] == "(":
            take()
            r = alt()
            take(")")
            return r
        what = "end of input" if tok[0] is None else repr(tok[0])
        raise RegexError(f"unexpected {what} at column {tok[1] + 1}")

    r = alt()
    if peek()[0] is not None:
        raise RegexError(f"unexpected {peek()[0]!r} at column {peek()[1] + 1}")
    return r


def to_text(r: Regex) -> str:
    """Concrete syntax; ``parse_regex(to_text(r)) == r`` for parser-built trees."""
    return _text(r, 0)


def _text(r: Regex, ctx: int) -> str:
    # ctx: 0 union position, 1 concat operand, 2 postfix operand
    if isinstance(r, Sym):
        return r.name
    if r is EPS or r is EMPTY:
        raise RegexError("ε and ∅ have no concrete syntax; use to_grammar first")
    if isinstance(r, (Star, Plus)):
        s = _text(r.arg, 2) + ("*" if isinstance(r, Star) else "+")
        return s
    if isinstance(r, Union):
        s = " | ".join(_text(p, 1 if isinstance(p, Union) else 0) for p in r.parts)
        return f"({s})" if ctx > 0 else s
    if isinstance(r, Concat):
        # concatenation is right-nested, so a left operand that is itself a concat needs parens
        s = _text(r.left, 2 if isinstance(r.left, Concat) else 1) + " . " + _text(r.right, 1)
        return f"({s})" if ctx > 1 else s
    raise TypeError(r)


def to_grammar(r: Regex) -> Regex:
    """An ε/∅-free tree with the same (empty-word-excluded) language.

    Raises UninhabitedPattern when the language is empty.
    """
    out = _nonempty_part(r)
    if out is None:
        raise UninhabitedPattern(repr(r))
    return out


def _nonempty_part(r: Regex):
    if isinstance(r, Sym):
        return r
    if r is EPS or r is EMPTY:
        return None
    if isinstance(r, (Star, Plus)):
        inner = _nonempty_part(r.arg)
        return None if inner is None else plus(inner)
    if isinstance(r, Union):
        parts = [q for q in (_nonempty_part(p) for p in r.parts) if q is not None]
        return union(*parts) if parts else None
    if isinstance(r, Concat):
        left, right = _nonempty_part(r.left), _nonempty_part(r.right)
        options = []
        if left is not None and right is not None:
            options.append(concat(left, right))
        if nullable(r.left) and right is not None:
            options.append(right)
        if nullable(r.right) and left is not None:
            options.append(left)
        return union(*options) if options else None
    raise TypeError(r)
