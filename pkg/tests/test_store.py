from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pathprops.graph import GraphPath
from pathprops.store import ConstraintStore, StoreError
from pathprops.terms import (
    EDGE,
    NODE,
    PATH,
    VALUE,
    Atom,
    Elem,
    Lit,
    Op,
    Prop,
    SubstitutionError,
    Var,
    add,
    apply_substitution,
    mul,
    to_text,
)

X, Y = Var("X", VALUE), Var("Y", VALUE)


def test_equality_then_bound():
    s = ConstraintStore().add_all([Atom("==", X, Lit(1)), Atom(">", X, Lit(0))])
    assert s.consistent and s.entailed_value(X) == 1


def test_layover_refutation():
    start = Prop(Var("p2", PATH), "start")
    s = ConstraintStore().add_all([Atom(">", start, Lit(780)), Atom("==", start, Lit(720))])
    assert not s.consistent


def test_integer_lengths_refute_short_paths():
    L = [Prop(Var(f"p{i}", PATH), "length") for i in (1, 2, 3)]
    cs = [
        Atom("==", L[0], add(Lit(1), L[1])),
        Atom("<=", L[0], Lit(2)),
        Atom("==", L[1], add(Lit(1), L[2])),
        Atom(">", L[2], Lit(0)),
    ]
    assert not ConstraintStore({"length"}).add_all(cs).consistent


def test_integrality_matters():
    L1, L2 = Prop(Var("p1", PATH), "length"), Prop(Var("p2", PATH), "length")
    cs = [Atom("==", L1, add(Lit(1), L2)), Atom("<", L1, Lit(2)), Atom(">", L2, Lit(0))]
    assert ConstraintStore().add_all(cs).consistent  # L2 = 1/2 over the rationals
    assert not ConstraintStore({"length"}).add_all(cs).consistent


def test_back_substitution_keeps_integrality():
    a, b = Prop(Var("a", PATH), "n"), Prop(Var("b", PATH), "n")
    cs = [Atom("==", add(mul(Lit(2), a), b), Lit(0)), Atom("==", mul(Lit(2), a), Lit(1))]
    assert not ConstraintStore({"n"}).add_all(cs).consistent


def test_adding_to_refuted_store_is_an_error():
    s = ConstraintStore().add(Atom("==", X, Lit(1))).add(Atom("==", X, Lit(2)))
    assert not s.consistent
    with pytest.raises(StoreError):
        s.add(Atom("==", Y, Lit(0)))


def test_entailed_value_simple():
    assert ConstraintStore().add(Atom("==", X, Lit(5))).entailed_value(X) == 5
    assert ConstraintStore().add(Atom(">", X, Lit(5))).entailed_value(X) is None


def test_missing_price_leaves_a_residual():
    pi = GraphPath("n5", ("e6", "e7"), "n1")
    cost = Prop(pi, "cost")
    s = ConstraintStore().add(Atom("==", cost, add(Lit(650), Prop(Elem("e7", EDGE), "price"))))
    assert s.entailed_value(cost) is None
    assert [to_text(f) for f in s.residual()] == ["(n5, e6 e7, n1).cost - e7.price == 650"]


def test_residual_empty_when_determined():
    s = ConstraintStore().add_all([Atom("==", X, Lit(2)), Atom("==", Y, add(X, Lit(1)))])
    assert s.residual() == [] and s.entailed_value(Y) == 3


def test_nonlinear_constraint_is_suspended_then_woken():
    f = Atom("==", mul(X, Y), Lit(4))
    s = ConstraintStore().add(f)
    assert s.consistent and f in s.residual()
    t = s.add(Atom("==", X, Lit(2)))
    assert t.entailed_value(Y) == 2 and t.residual() == []
    assert not s.add(Atom("==", X, Lit(0))).consistent


def test_text_equality_and_disequality():
    loc = Prop(Elem("n1", NODE), "loc")
    s = ConstraintStore().add(Atom("==", loc, Lit("Los Angeles")))
    assert s.entailed_value(loc) == "Los Angeles"
    assert not s.add(Atom("!=", loc, Lit("Los Angeles"))).consistent
    assert not s.add(Atom("==", loc, Lit(3))).consistent


def test_rational_arithmetic_is_exact():
    s = ConstraintStore().add(Atom("==", mul(Lit(3), X), Lit(1)))
    assert s.entailed_value(X) == Fraction(1, 3)


def test_stores_are_values():
    s = ConstraintStore()
    s.add(Atom("==", X, Lit(1)))
    assert s.entailed_value(X) is None


def test_substitution_examples():
    x2 = Var("x2", NODE)
    f = Atom("==", Prop(x2, "loc"), Lit("Los Angeles"))
    assert to_text(apply_substitution(f, {x2: Elem("n1", NODE)})) == 'n1.loc == "Los Angeles"'
    assert apply_substitution(f, {}) == f

    p, q, y = Var("p", PATH), Var("p'", PATH), Var("y", EDGE)
    pi, pi2 = GraphPath("n5", ("e6", "e7"), "n1"), GraphPath("n4", ("e7",), "n1")
    g = Atom("==", Prop(p, "cost"), add(Prop(y, "price"), Prop(q, "cost")))
    out = apply_substitution(g, {y: Elem("e6", EDGE), p: pi, q: pi2})
    assert to_text(out) == "(n5, e6 e7, n1).cost == e6.price + (n4, e7, n1).cost"


def test_substitution_checks_kinds():
    with pytest.raises(SubstitutionError):
        apply_substitution(Atom("==", Prop(Var("p", PATH), "cost"), Lit(1)), {Var("p", PATH): Elem("n1", NODE)})


# -- properties over small integer systems -------------------------------------

KEYS = [Prop(Var(f"v{i}", PATH), "n") for i in range(3)]
GRID = range(-2, 3)
PREDS = ["==", "!=", "<", "<=", ">", ">="]


@st.composite
def linear_atoms(draw):
    coeffs = draw(st.lists(st.integers(-2, 2), min_size=3, max_size=3))
    terms = [mul(Lit(c), k) if c != 1 else k for c, k in zip(coeffs, KEYS) if c]
    left = add(*terms) if len(terms) > 1 else (terms[0] if terms else Lit(0))
    return Atom(draw(st.sampled_from(PREDS)), left, Lit(draw(st.integers(-3, 3))))


def _value(t, env):
    if isinstance(t, Lit):
        return t.value
    if isinstance(t, Prop):
        return env[t]
    vals = [_value(a, env) for a in t.args]
    if t.op == "+":
        return sum(vals)
    if t.op == "*":
        out = 1
        for v in vals:
            out *= v
        return out
    return vals[0] - vals[1]


def _holds(a: Atom, env) -> bool:
    left, right = _value(a.left, env), _value(a.right, env)
    return {"==": left == right, "!=": left != right, "<": left < right,
            "<=": left <= right, ">": left > right, ">=": left >= right}[a.pred]


def _solutions(atoms):
    for vals in product(GRID, repeat=len(KEYS)):
        env = dict(zip(KEYS, vals))
        if all(_holds(a, env) for a in atoms):
            yield env


def _boxed(atoms):
    box = [Atom(">=", k, Lit(GRID[0])) for k in KEYS] + [Atom("<=", k, Lit(GRID[-1])) for k in KEYS]
    return box + list(atoms)


@given(st.lists(linear_atoms(), max_size=5))
def test_refutation_is_sound(atoms):
    s = ConstraintStore({"n"}).add_all(_boxed(atoms))
    if not s.consistent:
        assert next(_solutions(atoms), None) is None


@given(st.lists(linear_atoms(), max_size=5))
def test_entailed_values_hold_in_every_solution(atoms):
    s = ConstraintStore({"n"}).add_all(_boxed(atoms))
    if not s.consistent:
        return
    sols = list(_solutions(atoms))
    for k in KEYS:
        v = s.entailed_value(k)
        if v is not None:
            assert all(env[k] == v for env in sols)


@given(st.lists(linear_atoms(), max_size=4))
def test_entailment_agrees_with_enumeration_on_equalities(atoms):
    # equalities only: a key is entailed exactly when the equations alone fix it
    atoms = [Atom("==", a.left, a.right) for a in atoms]
    s = ConstraintStore({"n"}).add_all(atoms)
    if not s.consistent:
        assert next(_solutions(atoms), None) is None
        return
    wide = [dict(zip(KEYS, v)) for v in product(range(-6, 7), repeat=3)]
    sols = [env for env in wide if all(_holds(a, env) for a in atoms)]
    for k in KEYS:
        v = s.entailed_value(k)
        if v is not None:
            assert all(env[k] == v for env in sols)
        elif sols:
            assert len({env[k] for env in sols}) > 1 or len(sols) == 1


@given(st.lists(linear_atoms(), max_size=4), linear_atoms())
def test_add_is_idempotent(atoms, c):
    s = ConstraintStore({"n"}).add_all(atoms)
    if not s.consistent:
        return
    once = s.add(c)
    twice = once.add(c) if once.consistent else once
    assert once.consistent == twice.consistent
    if once.consistent:
        assert [to_text(f) for f in once.residual()] == [to_text(f) for f in twice.residual()]
        assert all(once.entailed_value(k) == twice.entailed_value(k) for k in KEYS)


@given(st.lists(linear_atoms(), max_size=4), linear_atoms())
def test_add_is_monotone(atoms, c):
    s = ConstraintStore({"n"}).add_all(_boxed(atoms))
    if not s.consistent:
        return
    t = s.add(c)
    if t.consistent:
        for k in KEYS:
            if s.entailed_value(k) is not None:
                assert t.entailed_value(k) == s.entailed_value(k)


def test_op_subtraction_builder():
    s = ConstraintStore().add(Atom("==", Op("-", (X, Y)), Lit(2))).add(Atom("==", Y, Lit(1)))
    assert s.entailed_value(X) == 3
