"""Iterations to ||grad|| <= tol on random quadratics, one kappa per seed in each band."""
import argparse
import json
import math
from pathlib import Path

import numpy as np

from accel.harness import ProblemSpec, SolverSpec, build_problem, run_solver
from accel.io import write_json

SOLVERS = ("gd", "nagd", "rmpe5", {"name": "aa", "m": 3}, {"name": "aa_cheby", "m": 3},
           {"name": "aa", "m": 5}, {"name": "aa_cheby", "m": 5})


def run_band(lo, hi, d, seeds, tol, horizon, rng):
    rows = []
    for seed in range(seeds):
        kappa = max(10.0, float(rng.uniform(lo, hi)))
        prob = build_problem(ProblemSpec(kind="quadratic", d=d, mu=1.0, l=kappa), seed)
        x0 = np.zeros(d)
        row = {"seed": seed, "kappa": kappa}
        for item in SOLVERS:
            spec = SolverSpec.from_any(item)
            hit = run_solver(spec, prob, x0, horizon, tol).iterations_to(tol)
            row[spec.label] = "DNF" if hit is None else hit
        rows.append(row)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bands", default="0:500,500:2000,2000:5000")
    ap.add_argument("--d", type=int, default=100)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--tol", type=float, default=1e-6)
    ap.add_argument("--horizon", type=int, default=200_000)
    ap.add_argument("--rng-seed", type=int, default=2024)
    ap.add_argument("--out", type=Path, default=Path("runs/bands.json"))
    args = ap.parse_args()
    rng = np.random.default_rng(args.rng_seed)
    result = {}
    for band in args.bands.split(","):
        lo, hi = (float(v) for v in band.split(":"))
        rows = run_band(lo, hi, args.d, args.seeds, args.tol, args.horizon, rng)
        result[band] = rows
        print(f"band [{lo:g}, {hi:g}]")
        labels = [k for k in rows[0] if k not in ("seed", "kappa")]
        print("  kappa   " + " ".join(f"{k:>12}" for k in labels))
        for r in rows:
            print(f"  {r['kappa']:7.1f} " + " ".join(f"{str(r[k]):>12}" for k in labels))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_json(args.out, result)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
