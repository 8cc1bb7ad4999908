import csv
import io

import pytest

from pathprops.bench import (
    CSV_COLUMNS,
    TIMEOUT_MARK,
    VARIANTS,
    BenchConfig,
    BenchConfigError,
    CellResult,
    csv_text,
    generate_graph,
    query_pairs,
    run_bench,
    summarize,
    variant_setup,
)

SMALL = dict(nodes=12, edges=(10, 30), seed=3, queries=2, timeout=20.0)


def test_instances_are_nested():
    cfg = BenchConfig(nodes=20, edges=(0, 15, 40, 90), seed=5, queries=0)
    graphs = generate_graph(cfg)
    assert [len(g.edges) for g in graphs] == [0, 15, 40, 90]
    for small, big in zip(graphs, graphs[1:]):
        assert small.nodes == big.nodes
        assert small.edges <= big.edges
        for eid in small.edges:
            assert (small.src[eid], small.tgt[eid], small.props[eid]) == (big.src[eid], big.tgt[eid], big.props[eid])


def test_generated_values_stay_in_range():
    (g,) = generate_graph(BenchConfig(nodes=15, edges=(150,), seed=1, queries=0))
    pairs = set()
    for e in g.edges:
        assert g.src[e] != g.tgt[e] and (g.src[e], g.tgt[e]) not in pairs
        pairs.add((g.src[e], g.tgt[e]))
        p = g.props[e]
        assert 50 <= p["price"] <= 1000 and 300 <= p["dep"] <= 1379 and 60 <= p["arr"] - p["dep"] <= 600
    assert all(g.props[n]["loc"] == f"City_{n[1:]}" for n in g.nodes)


def _snapshot(g):
    return sorted((e, g.src[e], g.tgt[e], sorted(g.props[e].items())) for e in g.edges)


def test_generation_is_deterministic():
    cfg = BenchConfig(nodes=10, edges=(20,), seed=9, queries=3)
    assert _snapshot(generate_graph(cfg)[0]) == _snapshot(generate_graph(cfg)[0])
    assert query_pairs(cfg) == query_pairs(cfg)
    assert all(a != b for a, b in query_pairs(cfg))
    other = BenchConfig(nodes=10, edges=(20,), seed=10, queries=3)
    assert _snapshot(generate_graph(other)[0]) != _snapshot(generate_graph(cfg)[0])


def test_capacity_and_ordering_checked():
    with pytest.raises(BenchConfigError):
        generate_graph(BenchConfig(nodes=3, edges=(7,), queries=0))
    generate_graph(BenchConfig(nodes=3, edges=(6,), queries=0))
    for edges in [(30, 20), (10, 10), (-1, 5), ()]:
        with pytest.raises(BenchConfigError):
            BenchConfig(edges=edges)
    with pytest.raises(BenchConfigError):
        BenchConfig(variants=("L<4",))
    with pytest.raises(BenchConfigError):
        BenchConfig(nodes=1, queries=1)


def test_zero_queries_gives_header_only():
    cfg = BenchConfig(nodes=5, edges=(0,), queries=0)
    assert csv_text(run_bench(cfg)) == ",".join(CSV_COLUMNS) + "\n"


def test_variant_queries_parse():
    for v in VARIANTS:
        q, pdef = variant_setup(v, "City_0", "City_1")
        assert len(q.clauses) == 1 and len(q.clauses[0].filters) == 2 + v.count("<")
        assert ("length" in pdef.props) == (v != "none")


def test_output_is_reproducible_apart_from_timing():
    cfg = BenchConfig(**SMALL, variants=("L<3", "L<5&C<10000", "gap120"))
    rows = lambda: [r.row()[:4] + r.row()[5:] for r in run_bench(cfg)]  # noqa: E731
    assert rows() == rows()


def test_csv_schema_and_timeout_marks():
    cfg = BenchConfig(**SMALL, variants=("L<3", "gap120"))
    results = run_bench(cfg)
    results.append(CellResult("none", "E30", 0, 5, 20.0, True))
    rows = list(csv.reader(io.StringIO(csv_text(results))))
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 1 + 2 * 2 * 2 + 1
    for r in rows[1:]:
        assert r[5] in ("0", "1")
        if r[5] == "1":
            assert r[3] == r[4] == TIMEOUT_MARK
        else:
            assert TIMEOUT_MARK not in r and int(r[3]) >= 0 and float(r[4]) >= 0


def test_larger_instances_never_lose_answers():
    cfg = BenchConfig(**SMALL, variants=("L<5",))
    res = {(r.instance, r.query_id): r.results for r in run_bench(cfg)}
    for qi in range(cfg.queries):
        assert res[("E10", qi)] <= res[("E30", qi)]


def test_timeouts_are_reported():
    cfg = BenchConfig(nodes=30, edges=(400,), seed=2, queries=1, variants=("none",), timeout=0.05)
    (r,) = run_bench(cfg)
    assert r.timed_out and r.row()[3] == TIMEOUT_MARK


def test_summary_skips_timed_out_cells():
    rs = [CellResult("L<3", "E1", 0, 2, 1.0, False), CellResult("L<3", "E1", 1, 0, 9.0, True)]
    (s,) = summarize(rs)
    assert s["results"] == 2 and s["seconds"] == 1.0 and s["timeouts"] == 1 and s["cells"] == 2
