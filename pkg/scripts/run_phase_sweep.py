#!/usr/bin/env python3
"""Ratio sweep experiment: solver success fraction and exact satisfiable
fraction across r = M/N, plus the interpolated crossing point r*.

Typical runs:

    python scripts/run_phase_sweep.py -n 24 --r-from 0.3 --r-to 0.9 \
        --per-r 200 --budget 5 --seed 2024 -o sweep_n24.csv
    python scripts/run_phase_sweep.py -n 40 --r-from 0.4 --r-to 0.8 \
        --step 0.02 --per-r 50 --no-oracle -o sweep_n40.csv
"""

import argparse
import sys
import time

sys.path.insert(0, "src")  # allow running from a source checkout

from ec3 import SolverConfig, phase_sweep, r_star_estimate, write_sweep_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-n", "--n-vars", type=int, required=True)
    ap.add_argument("--r-from", type=float, default=0.3)
    ap.add_argument("--r-to", type=float, default=0.9)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--per-r", type=int, default=200, help="instances per grid point")
    ap.add_argument("--budget", type=int, default=5, help="restart budget per instance")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--no-oracle", action="store_true", help="skip exact enumeration")
    ap.add_argument("-o", "--output", default="sweep.csv")
    args = ap.parse_args()

    grid = []
    r = args.r_from
    while r <= args.r_to + 1e-9:
        grid.append(round(r, 10))
        r += args.step

    t0 = time.perf_counter()
    report = phase_sweep(
        args.n_vars,
        grid,
        args.per_r,
        SolverConfig(seed=0),
        args.budget,
        args.seed,
        workers=args.workers,
        use_oracle=not args.no_oracle,
        classify=False,
    )
    dt = time.perf_counter() - t0

    write_sweep_csv(report, args.output)
    print(f"wrote {args.output}  ({len(grid)} ratios x {args.per_r} instances, {dt:.1f} s)")
    for row in report.rows:
        sat = "     -" if row.oracle_sat_frac is None else f"{row.oracle_sat_frac:6.3f}"
        print(f"  r={row.r:5.3f}  M={row.n_clauses:4d}  solved={row.solver_success_frac:6.3f}  sat={sat}")
    rstar = r_star_estimate(report)
    if rstar is not None:
        print(f"r* (sat fraction crosses 1/2) = {rstar:.4f}")


if __name__ == "__main__":
    main()
