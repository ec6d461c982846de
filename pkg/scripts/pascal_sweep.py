#!/usr/bin/env python3
"""Sweep random trap trajectories and record the worst Pascal margin per time.

Writes a CSV with one row per time step: the minimum (over trajectories) of
W_phi(n) - W_0(n), exact.  A negative entry anywhere would falsify the
two-trap comparison; expect zeros at the start (any trajectory through the
origin ties) and growing positive slack afterwards.

Usage: python scripts/pascal_sweep.py --dim 1 --horizon 20 --trials 50 --out margins.csv
"""

import argparse
import csv
import sys
from fractions import Fraction
from itertools import product

from pascalwalk import (
    IncrementPmf,
    TrapTrajectory,
    evolve_survival,
    hit_mass,
    random_phi,
    simple_random_walk,
)


def box_law(d):
    cells = list(product((-1, 0, 1), repeat=d))
    return IncrementPmf(d, {c: Fraction(1, len(cells)) for c in cells})


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--dim", type=int, default=1)
    ap.add_argument("--horizon", type=int, default=20)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)

    pmf = simple_random_walk(args.dim)
    origin = hit_mass(
        evolve_survival(pmf, TrapTrajectory.zero(args.dim), args.horizon)
    )
    worst = [None] * (args.horizon + 1)
    for trial in range(args.trials):
        traj = random_phi(args.seed + trial, args.horizon + 1, box_law(args.dim))
        series = hit_mass(evolve_survival(pmf, traj, args.horizon))
        for n, (a, b) in enumerate(zip(series.values, origin.values)):
            margin = a - b
            if worst[n] is None or margin < worst[n]:
                worst[n] = margin

    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    writer = csv.writer(fh)
    writer.writerow(["n", "min_margin", "min_margin_float"])
    for n, m in enumerate(worst):
        writer.writerow([n, f"{m.numerator}/{m.denominator}", float(m)])
    if fh is not sys.stdout:
        fh.close()
        print(f"wrote {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
