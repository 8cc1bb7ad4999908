"""Shared hypothesis strategies and seeded generators."""
import random
from itertools import product

from hypothesis import strategies as st

from pathprops.regex import Concat, Plus, Star, Sym, Union, decompose, matches


def regexes(alphabet=("a", "b", "c"), max_leaves=8):
    leaf = st.sampled_from(alphabet).map(Sym)
    return st.recursive(
        leaf,
        lambda inner: st.one_of(
            inner.map(Star),
            inner.map(Plus),
            st.tuples(inner, inner).map(lambda t: Union(t)),
            st.tuples(inner, inner).map(lambda t: Concat(*t)),
        ),
        max_leaves=max_leaves,
    )


def random_regex(rng: random.Random, alphabet, depth: int = 4):
    """Seeded generator used by the acceptance checks."""
    if depth == 0 or rng.random() < 0.3:
        return Sym(rng.choice(alphabet))
    k = rng.randrange(4)
    if k == 0:
        return Star(random_regex(rng, alphabet, depth - 1))
    if k == 1:
        return Plus(random_regex(rng, alphabet, depth - 1))
    a, b = random_regex(rng, alphabet, depth - 1), random_regex(rng, alphabet, depth - 1)
    return Union((a, b)) if k == 2 else Concat(a, b)


def words(alphabet, max_len):
    for n in range(1, max_len + 1):
        yield from product(alphabet, repeat=n)


def member_by_decomposition(r, word, alphabet) -> bool:
    """Membership computed only from iterated decompositions."""
    d = decompose(r, alphabet)
    if len(word) == 1:
        return word[0] in d.s0
    return word[0] in d.s1 and member_by_decomposition(d.rem[word[0]], word[1:], alphabet)


def decomposition_agrees(r, alphabet, max_len=4) -> bool:
    return all(matches(r, w) == member_by_decomposition(r, w, alphabet) for w in words(alphabet, max_len))


def random_graph(rng: random.Random, max_nodes: int = 8, max_edges: int = 16):
    """Small flight-like multigraph; some properties are left out on purpose."""
    from pathprops.graph import PropertyGraph

    n = rng.randint(2, max_nodes)
    nodes = {}
    for i in range(n):
        props = {"loc": f"c{rng.randrange(3)}"} if rng.random() < 0.8 else {}
        nodes[f"n{i}"] = {"labels": rng.sample(["A", "B"], rng.randint(0, 2)), "props": props}
    edges = {}
    for k in range(rng.randint(1, max_edges)):
        dep = rng.randint(0, 20)
        props = {"price": rng.randint(1, 9), "dep": dep, "arr": dep + rng.randint(0, 4)}
        if rng.random() < 0.1:
            del props[rng.choice(sorted(props))]
        edges[f"e{k}"] = {
            "src": f"n{rng.randrange(n)}", "tgt": f"n{rng.randrange(n)}",
            "labels": [rng.choice(["f", "t"])], "props": props,
        }
    return PropertyGraph.build(nodes, edges)


def _node(rng, var):
    label = rng.choice(["", "", ":A", ":B"])
    return f"({var}{label})"


def random_query_text(rng: random.Random, max_clauses: int = 3, max_length: int = 4) -> str:
    """Up to ``max_clauses`` clauses over shared node variables; every path clause bounds its length."""
    from pathprops.regex import to_text as regex_text

    pool = [f"x{i}" for i in range(1, 4)]
    lines = []
    for k in range(rng.randint(1, max_clauses)):
        kind = rng.choices(["node", "edge", "path"], weights=[1, 2, 4])[0]
        a, b = rng.choice(pool), rng.choice(pool)
        filters = []
        if kind == "node":
            lines.append(f"match {_node(rng, a)}")
            if rng.random() < 0.5:
                filters.append(f'{a}.loc == "c{rng.randrange(3)}"')
        elif kind == "edge":
            lines.append(f"match {_node(rng, a)} -[y{k}:{rng.choice(['f', 't'])}]-> {_node(rng, b)}")
            if rng.random() < 0.4:
                filters.append(f"y{k}.price < {rng.randint(2, 9)}")
        else:
            r = random_regex(rng, ["f", "t"], depth=3)
            lines.append(f"match {_node(rng, a)} =[p{k}:{regex_text(r)}]=> {_node(rng, b)}")
            filters.append(f"p{k}.length <= {rng.randint(1, max_length)}")
            if rng.random() < 0.4:
                filters.append(f"p{k}.cost < {rng.randint(3, 25)}")
            if rng.random() < 0.3:
                filters.append(f"{b}.loc != {a}.loc")
        if filters:
            lines[-1] += " where " + ", ".join(filters)
    return "\n".join(lines)


def random_case(rng: random.Random):
    """(graph, query, definition) for engine-versus-enumeration checks."""
    from pathprops.fixtures import connection_defs
    from pathprops.syntax import parse_query

    g = random_graph(rng)
    pdef = connection_defs(gap=rng.choice([None, 0, 2, 5]), positive_length=True)
    return g, parse_query(random_query_text(rng)), pdef
