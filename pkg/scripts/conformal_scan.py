#!/usr/bin/env python3
"""Sweep the conformal family parameter and report condition transitions.

For each value of the coefficient `a` in the scan range the script
classifies the metric e^{2f}(dx^2+dy^2), f = x^3 y + a x^2 y^2 + x y^3, near
the origin as one of:

  passes-necessary    nonnegative curvature and nonnegative discriminant
  fails-second-order  nonnegative curvature, discriminant negative somewhere
  fails-zeroth        curvature already negative somewhere

and prints the parameter values where the classification changes.
"""

from __future__ import annotations

import argparse
import csv
import sys

from mtwcheck import conformal as cf


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--a-from", type=float, default=-4.0)
    parser.add_argument("--a-to", type=float, default=-2.5)
    parser.add_argument("--step", type=float, default=0.005)
    parser.add_argument("--csv", help="write per-a rows to this CSV file")
    args = parser.parse_args(argv)

    # build the grid in integer arithmetic so round decimals are hit exactly
    scale = 1_000_000
    start = round(args.a_from * scale)
    stop = round(args.a_to * scale)
    inc = round(args.step * scale)
    grid = [k / scale for k in range(start, stop + 1, inc)]

    rows = []
    for a in grid:
        spec = cf.ConformalSpec(a=a)
        rows.append(
            {
                "a": a,
                "classification": cf.classify(a),
                "curvature_nonneg": cf.nonneg_curvature_threshold(spec),
            }
        )

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {len(rows)} rows to {args.csv}")

    transitions = [
        (prev["a"], cur["a"], prev["classification"], cur["classification"])
        for prev, cur in zip(rows, rows[1:])
        if prev["classification"] != cur["classification"]
    ]
    print(f"scanned a in [{grid[0]}, {grid[-1]}] with step {args.step}")
    for lo, hi, before, after in transitions:
        print(f"  {before} -> {after} between a={lo} and a={hi}")
    if not transitions:
        print("  no classification change in range")
    return 0


if __name__ == "__main__":
    sys.exit(main())
