"""Compare register automata with their translations on every short data path.

With no arguments, checks the bundled equality automaton plus a batch of random
automata; ``--count`` and ``--seed`` size the batch.
"""
import argparse
import random
import sys
import time

from pathprops.rdpa import check_translation, equality_automaton, random_automaton


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--max-len", type=int, default=7)
    ap.add_argument("--data", type=int, default=4)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    automata = [("equality", equality_automaton())]
    automata += [(f"random {i}", random_automaton(rng, 4, 2, ("a", "b"), range(args.data))) for i in range(args.count)]
    failed = 0
    for name, a in automata:
        t0 = time.perf_counter()
        bad = check_translation(a, ("a", "b"), range(args.data), args.max_len)
        failed += bool(bad)
        print(f"{name:<10} {len(bad):>4} disagreements  {time.perf_counter() - t0:.2f}s")
    print(f"{failed} of {len(automata)} automata disagree")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
