import pytest

from pathprops.engine import (
    Engine,
    SolveOptions,
    Triple,
    answer_set,
    initial_state,
    oracle_solve,
    solve,
    solve_all,
)
from pathprops.fixtures import airline_graph, barcelona_la_query, connection_defs, two_hops_query
from pathprops.graph import GraphPath
from pathprops.properties import EMPTY_DEF
from pathprops.query import Query, QueryError
from pathprops.syntax import parse_query
from pathprops.terms import to_text

BCN_LA = {"x1": "n6", "x2": "n5", "x3": "n1", "y": "e1", "p": GraphPath("n5", ("e6", "e7"), "n1")}


def test_initial_state():
    st = initial_state(barcelona_la_query())
    assert len(st.remaining) == 3 and not st.bindings and not st.paths and st.psi.sources == ()
    assert len(initial_state(parse_query("match (x)")).remaining) == 1
    dup = parse_query("match (x:A)\nmatch (x:A)")
    assert len(initial_state(dup).remaining) == 1


def test_empty_query_rejected():
    with pytest.raises(QueryError):
        Query(())


def test_rule_r(g, conn):
    q = barcelona_la_query()
    e = Engine(g, conn)
    st = initial_state(q, conn)
    first, edge = q.clauses[0], q.clauses[1]
    x1 = first.pattern.var
    after = e.apply_R(st, first, {x1: "n6"})
    assert after is not None and after.binding_map() == {x1: "n6"}
    assert e.apply_R(st, first, {x1: "n1"}) is None  # n1 is not a train station
    p = edge.pattern
    m = {p.edge: "e1", p.src.var: "n6", p.tgt.var: "n5"}
    assert e.apply_R(after, edge, m) is not None
    with pytest.raises(ValueError):
        e.apply_R(after, first, {x1: "n6"})


def _step(engine, st):
    return list(engine.successors(st))


def test_example_derivation(g, conn):
    q = two_hops_query()
    e = Engine(g, conn, SolveOptions(debug=True))
    st0 = initial_state(q, conn)
    first = _step(e, st0)
    # no direct flight reaches Los Angeles: only extensions survive
    assert all(len(s.remaining) == 1 for s in first)
    by_edge = {next(iter(s.paths)).edges: s for s in first}
    assert set(by_edge) == {("e5",), ("e6",)}
    s1 = by_edge[("e5",)]
    (t,) = s1.paths
    assert t.path.name == "p1" and t.cont is not None and t.cont.name.startswith("_p")
    assert f"{t.cont.name}.start > 780" in [to_text(f) for f in s1.psi.residual()]
    # continuing with e3 is refuted by the 12:00 departure
    e.stats.trace.clear()
    assert _step(e, s1) == []
    refuted = [r for r in e.stats.trace if not r[3]]
    assert any("e3" in r[2] and "start == 720" in r[4] for r in refuted)
    # the e6 branch closes the path with e7
    finals = [s for s in _step(e, by_edge[("e6",)]) if s.final]
    closed = {tt.edges for s in finals for tt in s.paths}
    assert closed == {("e6", "e7")}
    assert all(tt.cont is None for s in finals for tt in s.paths)


def test_single_edge_path(g):
    q = parse_query("match (a) =[p:byTrain+]=> (b)")
    answers, _ = solve_all(q, g)
    assert [a.as_dict() for a in answers] == [{"a": "n6", "b": "n5", "p": GraphPath("n6", ("e1",), "n5")}]
    e = Engine(g)
    (s,) = [s for s in e.successors(initial_state(q)) if s.final]
    assert s.paths == {Triple(q.clauses[0].pattern.path, ("e1",), None)}


def test_running_query(g, conn):
    answers, stats = solve_all(barcelona_la_query(), g, conn)
    assert [a.as_dict() for a in answers] == [BCN_LA]
    (name, values, residual), = answers[0].report
    assert name == "p" and values == {"length": 2, "cost": 950, "start": 540} and residual == ()
    assert stats.answers == 1 and not stats.truncated


def test_expensive_and_tight_connections_are_excluded(g, conn):
    found = answer_set(solve(barcelona_la_query(), g, conn))
    paths = {dict(b)["p"].edges for b in found}
    assert ("e6", "e8") not in paths
    assert not any(p[:2] == ("e5", "e3") for p in paths)


def test_engine_matches_oracle_on_examples(g, conn):
    for q in (two_hops_query(), barcelona_la_query()):
        assert answer_set(solve(q, g, conn)) == oracle_solve(q, g, conn, bound=4)


def test_two_hops_exact(g, conn):
    assert [a["p1"].edges for a in solve(two_hops_query(), g, conn)] == [("e6", "e7")]


def test_oracle_edge_cases(g, conn):
    q = parse_query("match (a) =[p:Flight+]=> (b) where p.length < 1")
    assert oracle_solve(q, g, conn, bound=3) == set()
    assert list(solve(q, g, conn)) == []
    assert oracle_solve(two_hops_query(), g, conn, bound=0) == set()


def test_path_modes():
    from pathprops.graph import PropertyGraph

    ring = PropertyGraph.build(
        {"a": {}, "b": {}},
        {"f": {"src": "a", "tgt": "b", "labels": ["R"]}, "h": {"src": "b", "tgt": "a", "labels": ["R"]}},
    )
    q = parse_query("match (s) =[p:R+]=> (t)")
    simple = {a["p"].edges for a in solve(q, ring, EMPTY_DEF, SolveOptions(mode="simple"))}
    assert simple == {("f",), ("h",)}
    trail = {a["p"].edges for a in solve(q, ring, EMPTY_DEF, SolveOptions(mode="trail"))}
    assert trail == {("f",), ("h",), ("f", "h"), ("h", "f")}
    capped = {a["p"].edges for a in solve(q, ring, EMPTY_DEF, SolveOptions(depth_cap=3))}
    assert max(map(len, capped)) == 3 and len(capped) == 6


def test_limit_and_timeout(g, conn):
    q = parse_query("match (a) =[p:Flight+]=> (b)")
    assert len(list(solve(q, g, conn, SolveOptions(limit=2)))) == 2
    assert list(solve(q, g, conn, SolveOptions(limit=0))) == []
    stream = solve(q, g, EMPTY_DEF, SolveOptions(timeout=0.0))
    assert list(stream) == [] and stream.truncated


def test_uninhabited_regex_is_rejected_before_search(g):
    from pathprops.query import Clause, NodePattern, PathPattern
    from pathprops.regex import EMPTY
    from pathprops.terms import NODE, PATH, Var

    pat = PathPattern(NodePattern(Var("a", NODE)), Var("p", PATH), EMPTY, NodePattern(Var("b", NODE)))
    with pytest.raises(Exception):
        list(solve(Query((Clause(pat),)), g))


def test_residuals_reported_when_values_are_open():
    g = airline_graph(e7={"price": None})  # a missing price leaves the cost symbolic
    answers = list(solve(two_hops_query(), g, connection_defs()))
    (a,) = answers
    (_, values, residual), = a.report
    assert values["cost"] is None and values["length"] == 2
    assert any("e7.price" in r for r in residual)


def test_debug_mode_checks_every_state(g, conn):
    answers, stats = solve_all(barcelona_la_query(), g, conn, SolveOptions(debug=True))
    assert len(answers) == 1 and stats.trace


def test_answers_are_deterministic(g, conn):
    q = parse_query("match (a:Airport) =[p:Flight+]=> (b:Airport) where p.length <= 2")
    first = [a.bindings for a in solve(q, g, conn)]
    assert first == [a.bindings for a in solve(q, g, conn)]
    assert answer_set(solve(q, g, conn)) == oracle_solve(q, g, conn, bound=3)
