"""Random flight networks and a timing harness over query variants.

Instances share one node set and differ only in edges: the edge list of the
largest instance is drawn once, and every smaller instance is a prefix of it,
so the instances are nested by construction.

Distributions (fixed, so counts are reproducible for a seed):

* nodes ``a0..a{n-1}``, label ``Airport``, ``loc`` = ``"City_i"``
* edges label ``Flight`` between distinct ordered node pairs, no pair repeated
* ``price`` uniform integer in [50, 1000]
* ``dep`` uniform integer in [300, 1379]; ``arr`` = ``dep`` + uniform integer in [60, 600]
  (arrivals past midnight stay absolute, no wraparound)
"""
from __future__ import annotations

import csv
import io
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .engine import Engine, SolveOptions
from .fixtures import connection_defs
from .graph import PropertyGraph
from .properties import EMPTY_DEF
from .syntax import parse_query

CSV_COLUMNS = ("variant", "instance", "query_id", "results", "seconds", "timed_out")
TIMEOUT_MARK = "*"

# name -> (layover gap, or "none" for no properties at all; extra path filters)
_VARIANT_TABLE = {
    "none": ("none", ()),
    "L<3": (None, ("p.length < 3",)),
    "L<5": (None, ("p.length < 5",)),
    "L<10": (None, ("p.length < 10",)),
    "L<3&C<10000": (None, ("p.length < 3", "p.cost < 10000")),
    "L<5&C<10000": (None, ("p.length < 5", "p.cost < 10000")),
    "L<10&C<10000": (None, ("p.length < 10", "p.cost < 10000")),
    "gap120": (120, ()),
}
VARIANTS = tuple(_VARIANT_TABLE)


class BenchConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    nodes: int = 100
    edges: tuple = (200, 500, 1000, 5000)
    seed: int = 0
    queries: int = 10
    variants: tuple = VARIANTS
    timeout: float = 60.0
    out: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(int(e) for e in self.edges))
        object.__setattr__(self, "variants", tuple(self.variants))
        if self.nodes < 0 or self.queries < 0 or self.workers < 1:
            raise BenchConfigError("nodes and queries must be nonnegative, workers positive")
        if not self.edges:
            raise BenchConfigError("at least one edge count is needed")
        if self.edges[0] < 0 or any(b <= a for a, b in zip(self.edges, self.edges[1:])):
            raise BenchConfigError(f"edge counts must be nonnegative and strictly increasing, got {list(self.edges)}")
        unknown = [v for v in self.variants if v not in _VARIANT_TABLE]
        if unknown:
            raise BenchConfigError(f"unknown variants {unknown}; known: {list(VARIANTS)}")
        if self.queries and self.nodes < 2:
            raise BenchConfigError("queries need at least two nodes")


def city(i: int) -> str:
    return f"City_{i}"


def generate_graph(cfg: BenchConfig) -> list:
    """One graph per entry of ``cfg.edges``; each one's edges extend the previous one's."""
    n, top = cfg.nodes, cfg.edges[-1]
    capacity = n * (n - 1)
    if top > capacity:
        raise BenchConfigError(f"{top} edges do not fit in a simple graph on {n} nodes (at most {capacity})")
    rng = random.Random(cfg.seed)
    pairs = rng.sample(range(capacity), top)
    nodes = {f"a{i}": {"labels": ["Airport"], "props": {"loc": city(i)}} for i in range(n)}
    edges = []
    for k, code in enumerate(pairs):
        s, t = divmod(code, n - 1)
        t += t >= s  # skip the diagonal
        dep = rng.randint(300, 1379)
        edges.append((f"f{k}", {
            "src": f"a{s}", "tgt": f"a{t}", "labels": ["Flight"],
            "props": {"price": rng.randint(50, 1000), "dep": dep, "arr": dep + rng.randint(60, 600)},
        }))
    return [PropertyGraph.build(nodes, dict(edges[:m])) for m in cfg.edges]


def query_pairs(cfg: BenchConfig) -> list:
    """``cfg.queries`` (departure, arrival) city pairs, distinct within each pair."""
    rng = random.Random(f"{cfg.seed}/queries")
    return [tuple(city(i) for i in rng.sample(range(cfg.nodes), 2)) for _ in range(cfg.queries)]


def variant_setup(variant: str, origin: str, destination: str):
    """The (query, definition) pair a variant runs."""
    gap, extra = _VARIANT_TABLE[variant]
    pdef = EMPTY_DEF if gap == "none" else connection_defs(gap)
    filters = [f'x1.loc == "{origin}"', f'x2.loc == "{destination}"', *extra]
    text = f"match (x1:Airport) =[p:Flight+]=> (x2:Airport) where {', '.join(filters)}"
    return parse_query(text), pdef


@dataclass
class CellResult:
    variant: str
    instance: str
    query_id: int
    results: Optional[int]
    seconds: float
    timed_out: bool
    error: Optional[str] = field(default=None)

    def row(self) -> tuple:
        if self.timed_out:
            results, seconds = TIMEOUT_MARK, TIMEOUT_MARK
        else:
            results = f"error:{self.error}" if self.error else str(self.results)
            seconds = f"{self.seconds:.6f}"
        return (self.variant, self.instance, str(self.query_id), results, seconds, "1" if self.timed_out else "0")


def run_cell(graph: PropertyGraph, instance: str, variant: str, query_id: int, pair: tuple, timeout: float) -> CellResult:
    q, pdef = variant_setup(variant, *pair)
    engine = Engine(graph, pdef, SolveOptions(mode="simple", depth_cap=None, timeout=timeout))
    t0 = time.perf_counter()
    count, error = 0, None
    try:
        for _ in engine.solve(q):
            count += 1
    except Exception as e:  # recorded in the row, the run goes on
        error = type(e).__name__
    seconds = time.perf_counter() - t0
    return CellResult(variant, instance, query_id, count, seconds, engine.stats.truncated, error)


def _cell(args):
    return run_cell(*args)


def instance_name(edge_count: int) -> str:
    return f"E{edge_count}"


def run_bench(cfg: BenchConfig, graphs: Optional[list] = None) -> list:
    """All (variant, instance, query) cells in a fixed order; cells may run in parallel."""
    graphs = generate_graph(cfg) if graphs is None else graphs
    pairs = query_pairs(cfg)
    jobs = [
        (g, instance_name(m), v, qi, pair, cfg.timeout)
        for v in cfg.variants
        for m, g in zip(cfg.edges, graphs)
        for qi, pair in enumerate(pairs)
    ]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(_cell, jobs))
    else:
        results = [_cell(j) for j in jobs]
    if cfg.out:
        write_csv(results, cfg.out)
    return results


def csv_text(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow(r.row())
    return buf.getvalue()


def write_csv(results, path) -> None:
    Path(path).write_text(csv_text(results), encoding="utf-8")


def summarize(results) -> list:
    """Per (variant, instance): mean result count and mean seconds over completed cells, plus timeouts."""
    groups = {}
    for r in results:
        groups.setdefault((r.variant, r.instance), []).append(r)
    out = []
    for (v, inst), rs in groups.items():
        done = [r for r in rs if not r.timed_out and r.error is None]
        mean = (lambda xs: sum(xs) / len(xs)) if done else (lambda xs: None)
        out.append({
            "variant": v, "instance": inst,
            "results": mean([r.results for r in done]), "seconds": mean([r.seconds for r in done]),
            "timeouts": sum(r.timed_out for r in rs), "cells": len(rs),
        })
    return out
