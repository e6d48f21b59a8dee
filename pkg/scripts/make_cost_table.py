#!/usr/bin/env python3
"""Print and save the device/cycle cost comparison across adder schemes."""

import argparse
import sys

from crsadder.cli import main as cli_main


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--n-min", type=int, default=1)
    ap.add_argument("--n-max", type=int, default=8)
    args = ap.parse_args(argv)
    return cli_main(["--out", args.out, "compare",
                     "--n-min", str(args.n_min),
                     "--n-max", str(args.n_max)])


if __name__ == "__main__":
    sys.exit(main())
