#!/usr/bin/env python3
"""Quasi-static I-V sweeps for the unit cell and the anti-serial pair.

Writes unit_iv.csv, crs_iv.csv and landmarks.json into --out and prints
the extracted switching landmarks.  Plotting the two CSVs against each
other shows the butterfly curve collapsing into the windowed pair
characteristic.
"""

import argparse
import sys

from crsadder.cli import main as cli_main


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/sweeps")
    ap.add_argument("--samples", type=int, default=1500)
    ap.add_argument("--rate", type=float, default=2.0,
                    help="sweep rate in V/s")
    args = ap.parse_args(argv)

    rc = cli_main(["--out", args.out, "sweep", "--device", "unit",
                   "--samples", str(args.samples), "--rate", str(args.rate)])
    if rc:
        return rc
    # separate dir so the two landmark files do not clobber each other
    return cli_main(["--out", args.out + "/pair", "sweep", "--device",
                     "crs", "--samples", str(args.samples),
                     "--rate", str(args.rate)])


if __name__ == "__main__":
    sys.exit(main())
