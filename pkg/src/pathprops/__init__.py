"""Conjunctive regular path queries over property graphs, with path properties
defined inductively by constraints and evaluated by a constraint-solving search."""

from .engine import Engine, SolveOptions, oracle_solve, solve, solve_all
from .files import load_graph, save_graph
from .graph import BOTTOM, GraphPath, PropertyGraph
from .properties import EMPTY_DEF, PropertyDef, constr_path, path_store, path_values
from .query import Answer, Clause, EdgePattern, NodePattern, PathPattern, Query
from .regex import decompose, matches, parse_regex
from .store import ConstraintStore
from .syntax import parse_defs, parse_query, parse_query_document

__all__ = [
    "Answer", "BOTTOM", "Clause", "ConstraintStore", "EMPTY_DEF", "EdgePattern", "Engine", "GraphPath",
    "NodePattern", "PathPattern", "PropertyDef", "PropertyGraph", "Query", "SolveOptions", "constr_path",
    "decompose", "load_graph", "matches", "oracle_solve", "parse_defs", "parse_query", "parse_query_document",
    "parse_regex", "path_store", "path_values", "save_graph", "solve", "solve_all",
]
