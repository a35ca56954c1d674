#!/usr/bin/env python3
"""Verify the geodesic-variation derivative identities numerically.

Each identity expresses a derivative of the two-parameter geodesic variation
(parallel transport derivatives, Jacobi-field derivatives, mixed terms) in
terms of curvature contractions along the base geodesic.  The script
finite-differences the left side, evaluates the right side from the
curvature tensors, and reports the worst mismatch per identity.
"""

from __future__ import annotations

import argparse
import math
import sys
from collections import defaultdict

import numpy as np

from mtwcheck import conformal as cf
from mtwcheck.dynamics import lemma_suite
from mtwcheck.geometry import euclidean_metric, sphere_metric


def build_case(name: str):
    if name == "flat":
        return euclidean_metric(2), np.zeros(2)
    if name == "sphere2":
        return sphere_metric(), np.array([math.pi / 2, 0.0])
    if name == "conformal2d":
        return cf.conformal_metric(cf.ConformalSpec(a=-3.0)), np.zeros(2)
    raise SystemExit(f"unknown metric {name!r}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--metric", default="sphere2",
                        choices=["flat", "sphere2", "conformal2d"])
    parser.add_argument("--h", type=float, default=1e-2)
    parser.add_argument("--steps", type=int, default=200)
    parser.add_argument("--tol", type=float, default=1e-3)
    args = parser.parse_args(argv)

    metric, x = build_case(args.metric)
    u = np.array([1.0, 0.0])
    v = np.array([0.6, -0.3])
    w = np.array([0.2, 0.9])
    checks = lemma_suite(metric, None, x, u, v, w, h=args.h, steps=args.steps)

    worst = defaultdict(float)
    for check in checks:
        worst[check.name] = max(worst[check.name], check.error)
    width = max(len(name) for name in worst)
    print(f"metric {args.metric}, base point {x.tolist()}, "
          f"{len(checks)} identity evaluations")
    failed = 0
    for name, err in sorted(worst.items()):
        mark = "ok" if err <= args.tol else "FAIL"
        failed += err > args.tol
        print(f"  {name:<{width}}  worst error {err:.3e}  {mark}")
    if failed:
        print(f"{failed} identities above tolerance {args.tol}")
        return 1
    print(f"all identities within tolerance {args.tol}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
