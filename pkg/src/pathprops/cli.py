"""Command-line interface.

Exit status: 0 on success, 1 on invalid input (including usage errors), 2 when a
time limit cut the answer set short.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .bench import VARIANTS, BenchConfig, BenchConfigError, csv_text, run_bench, summarize
from .engine import MODES, SolveOptions, solve
from .files import GraphFileError, load_graph
from .graph import BOTTOM, GraphError, GraphPath
from .properties import EMPTY_DEF, DefinitionError
from .query import QueryError
from .rdpa import RdpaError, check_translation, load_automaton
from .regex import RegexError
from .syntax import GRAMMAR, SyntaxProblem, parse_defs, parse_query_document

EXIT_OK, EXIT_INVALID, EXIT_TRUNCATED = 0, 1, 2
INPUT_ERRORS = (SyntaxProblem, DefinitionError, QueryError, GraphError, RegexError, RdpaError, BenchConfigError, OSError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n\nInput syntax reference:\n{GRAMMAR}")
        raise SystemExit(EXIT_INVALID)


def _json_value(v):
    if v is BOTTOM:
        return {"undefined": True}
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else {"num": v.numerator, "den": v.denominator}
    if isinstance(v, GraphPath):
        return {"source": v.source, "edges": list(v.edges), "target": v.target}
    return v


def answer_doc(ans) -> dict:
    return {
        "bindings": {k: _json_value(v) for k, v in ans.bindings},
        "paths": {
            name: {"properties": {k: _json_value(v) for k, v in values.items()}, "residual": list(residual)}
            for name, values, residual in ans.report
        },
    }


def _cell_text(v) -> str:
    if v is None:
        return "?"
    if v is BOTTOM:
        return "undefined"
    if isinstance(v, GraphPath):
        return f"{v.source}-[{' '.join(v.edges)}]->{v.target}"
    return str(v)


def answers_table(answers) -> str:
    if not answers:
        return "(no answers)\n"
    cols = [k for k, _ in answers[0].bindings]
    props = [f"{name}.{k}" for name, values, _ in answers[0].report for k in values]
    rows = []
    for a in answers:
        vals = [_cell_text(v) for _, v in a.bindings]
        vals += [_cell_text(v) for _, values, _ in a.report for v in values.values()]
        rows.append(vals)
    header = cols + props
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(header)]
    line = lambda r: "  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip()  # noqa: E731
    return "\n".join([line(header), line(["-" * w for w in widths]), *map(line, rows)]) + "\n"


def _read_query(path: Path, defs_path):
    doc = parse_query_document(path.read_text(encoding="utf-8"))
    if defs_path is None and doc.defs_ref is not None:
        defs_path = path.parent / doc.defs_ref
    pdef = parse_defs(Path(defs_path).read_text(encoding="utf-8")) if defs_path else EMPTY_DEF
    return doc.query, pdef


def cmd_query(args) -> int:
    g = load_graph(args.graph)
    q, pdef = _read_query(Path(args.query), args.defs)
    opts = SolveOptions(mode=args.mode, limit=args.limit, depth_cap=args.depth_cap, timeout=args.timeout)
    stream = solve(q, g, pdef, opts)
    answers = list(stream)
    st = stream.stats
    if args.format == "json":
        out = {
            "answers": [answer_doc(a) for a in answers],
            "count": len(answers),
            "truncated": st.truncated,
            "stats": {"explored": st.explored, "rejected": st.rejected, "capped": st.capped},
        }
        sys.stdout.write(json.dumps(out, indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(answers_table(answers))
        if st.truncated:
            sys.stdout.write("(time limit reached, answers may be missing)\n")
    return EXIT_TRUNCATED if st.truncated else EXIT_OK


def cmd_bench(args) -> int:
    cfg = BenchConfig(
        nodes=args.nodes, edges=tuple(args.edges), seed=args.seed, queries=args.queries,
        variants=tuple(args.variants), timeout=args.timeout, out=args.out, workers=args.workers,
    )
    results = run_bench(cfg)
    if args.out is None:
        sys.stdout.write(csv_text(results))
    else:
        for s in summarize(results):
            mean = "*" if s["seconds"] is None else f"{s['results']:.1f} results, {s['seconds']:.3f}s"
            print(f"{s['variant']:<14} {s['instance']:<7} {mean}  timeouts {s['timeouts']}/{s['cells']}")
    return EXIT_OK


def cmd_rdpa_check(args) -> int:
    a = load_automaton(args.automaton)
    sigma = args.sigma.split(",") if args.sigma else None
    bad = check_translation(a, sigma, range(args.data), args.max_len)
    for w in bad[:20]:
        print("disagreement:", " ".join(map(str, w)))
    print(f"{len(bad)} disagreements on data paths up to {args.max_len} positions")
    return EXIT_OK if not bad else EXIT_INVALID


def _validate_one(path: Path) -> str:
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".defs":
        d = parse_defs(text)
        return f"definitions of {', '.join(d.props) or 'no properties'}"
    if path.suffix == ".query":
        doc = parse_query_document(text)
        return f"query with {len(doc.query.clauses)} clauses"
    if path.suffix == ".json":
        try:
            head = json.loads(text)
        except json.JSONDecodeError as e:
            raise GraphFileError([f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"])
        if isinstance(head, dict) and "data_states" in head:
            a = load_automaton(path)
            return f"automaton with {len(a.data_states) + len(a.word_states)} states, {a.registers} registers"
        g = load_graph(path)
        return f"graph with {len(g.nodes)} nodes, {len(g.edges)} edges"
    raise SyntaxProblem(f"cannot tell the file type of {path.name}; use .json, .defs or .query")


def cmd_validate(args) -> int:
    status = EXIT_OK
    for name in args.files:
        try:
            print(f"ok {name}: {_validate_one(Path(name))}")
        except INPUT_ERRORS as e:
            status = EXIT_INVALID
            problems = getattr(e, "problems", None) or [str(e)]
            for p in problems:
                print(f"error {name}: {p}")
    return status


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="pathprops", description="Path-property queries over property graphs.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("query", help="evaluate a query file over a graph file")
    q.add_argument("--graph", required=True)
    q.add_argument("--query", required=True)
    q.add_argument("--defs", help="property definitions (overrides a `using` line in the query)")
    q.add_argument("--mode", choices=MODES, default="any")
    q.add_argument("--limit", type=int)
    q.add_argument("--timeout", type=float)
    q.add_argument("--depth-cap", type=int, default=64)
    q.add_argument("--format", choices=("json", "table"), default="json")
    q.set_defaults(run=cmd_query)

    b = sub.add_parser("bench", help="time query variants on random nested flight networks")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--nodes", type=int, default=100)
    b.add_argument("--edges", type=int, nargs="+", default=[200, 500, 1000, 5000])
    b.add_argument("--queries", type=int, default=10)
    b.add_argument("--timeout", type=float, default=60.0)
    b.add_argument("--variants", nargs="+", choices=VARIANTS, default=list(VARIANTS))
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out", help="CSV destination; without it the CSV goes to stdout")
    b.set_defaults(run=cmd_bench)

    r = sub.add_parser("rdpa", help="register automata tools")
    rsub = r.add_subparsers(dest="rdpa_command", required=True, parser_class=_Parser)
    rc = rsub.add_parser("check", help="compare an automaton with its translation on all short data paths")
    rc.add_argument("--automaton", required=True)
    rc.add_argument("--max-len", type=int, default=7, help="maximum number of positions")
    rc.add_argument("--data", type=int, default=4, help="data domain is 0..N-1")
    rc.add_argument("--sigma", help="comma-separated word symbols (default: those on transitions)")
    rc.set_defaults(run=cmd_rdpa_check)

    v = sub.add_parser("validate", help="check graph (.json), automaton (.json), definition (.defs) or query (.query) files")
    v.add_argument("files", nargs="+")
    v.set_defaults(run=cmd_validate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.run(args)
    except BenchConfigError as e:
        ap.error(str(e))
    except INPUT_ERRORS as e:
        problems = getattr(e, "problems", None) or [str(e)]
        for p in problems:
            print(f"error: {p}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
