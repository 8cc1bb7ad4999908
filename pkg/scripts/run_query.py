"""Evaluate the running example query over the bundled graph and print the answers."""
from pathprops.cli import answers_table
from pathprops.engine import solve
from pathprops.fixtures import airline_graph, barcelona_la_query, connection_defs

if __name__ == "__main__":
    stream = solve(barcelona_la_query(), airline_graph(), connection_defs())
    print(answers_table(list(stream)), end="")
    st = stream.stats
    print(f"explored {st.explored} states, rejected {st.rejected}")
