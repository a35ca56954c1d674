#!/usr/bin/env python3
"""Calibrate the Jacobi-field evaluator against closed-form oracle values.

Runs the two-point Jacobi method on cases whose curvature value is known in
closed form (round sphere, flat quartic potentials) and fits the single
proportionality constant between the two routes.  A spread above the
tolerance means the two implementations disagree beyond quadrature error.
"""

from __future__ import annotations

import argparse
import sys

from mtwcheck import mtw


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--h", type=float, default=1e-2,
                        help="finite-difference step for the Jacobi route")
    parser.add_argument("--steps", type=int, default=200,
                        help="integration steps per geodesic")
    args = parser.parse_args(argv)

    result = mtw.calibrate_normalization(h=args.h, steps=args.steps)
    width = max(len(c.label) for c in result.cases)
    print(f"{'case':<{width}}  {'jacobi':>22}  {'closed-form':>12}  {'ratio':>22}")
    for case in result.cases:
        if case.closed_value != 0.0:
            ratio = f"{case.jacobi_value / case.closed_value:>22.15f}"
        else:
            ratio = f"{'-':>22}"
        print(f"{case.label:<{width}}  {case.jacobi_value:>22.15f}"
              f"  {case.closed_value:>12g}  {ratio}")
    print(f"\nnormalization constant: {result.kappa}")
    print(f"least-squares fit:      {result.fitted!r}")
    print(f"relative spread:        {result.spread:e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
