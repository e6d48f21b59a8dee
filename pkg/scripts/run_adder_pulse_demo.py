#!/usr/bin/env python3
"""Device-level demo: 01 + 01 = 010 on both adder schemes.

Calibrates the write pulse (cached in a sidecar under --out), runs the
two-bit flagship case as full pulse waveforms, and prints the read
verdicts.  The trace CSVs give per-sample wordline voltages and bitline
currents for plotting the spike pattern.
"""

import argparse
import json
import sys

from crsadder.cli import main as cli_main


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/pulse_demo")
    ap.add_argument("--a", default="01")
    ap.add_argument("--b", default="01")
    args = ap.parse_args(argv)

    rc = cli_main(["--out", args.out, "calibrate"])
    if rc:
        return rc
    for scheme in ("pc", "tc"):
        rc = cli_main(["--out", args.out, "adder", "--scheme", scheme,
                       "--a", args.a, "--b", args.b, "--level", "device"])
        if rc:
            return rc
        with open(f"{args.out}/adder_{scheme}_verdicts.json") as fh:
            verdicts = json.load(fh)
        print(f"[{scheme}] reads:")
        for v in verdicts:
            peak = v["peak_current_a"]
            print(f"  step {v['step']:>2}  {v['cell']}  "
                  f"{'spike ' if v['spike'] else 'quiet '}"
                  f"bit={v['bit']}"
                  + (f"  peak={peak:.3e} A" if peak is not None else ""))
    return 0


if __name__ == "__main__":
    sys.exit(main())
