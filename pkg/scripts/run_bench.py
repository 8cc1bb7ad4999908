"""Run the flight-network benchmark and write its CSV.

    python3 scripts/run_bench.py --edges 200 1000 --queries 3 --out bench.csv

Options are the same as ``pathprops bench``.
"""
import sys

from pathprops.cli import main

if __name__ == "__main__":
    sys.exit(main(["bench", *sys.argv[1:]]))
