"""Compare solvers on logistic regression over a CSV (bundled dataset by default)."""
import argparse
from pathlib import Path

import numpy as np

from accel.harness import ProblemSpec, SolverResult, SolverSpec, build_problem, ranking, run_solver
from accel.io import write_run_trace


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--csv", default=None)
    ap.add_argument("--label-column", default="y")
    ap.add_argument("--ridge", type=float, default=0.0)
    ap.add_argument("--tol", type=float, default=1e-6)
    ap.add_argument("--horizon", type=int, default=20_000)
    ap.add_argument("--out-dir", type=Path, default=Path("runs/logistic"))
    args = ap.parse_args()
    spec = ProblemSpec(kind="logistic", path=args.csv, label_column=args.label_column, ridge=args.ridge)
    prob = build_problem(spec, 0)
    x0 = np.zeros(prob.objective.dim)
    print(f"n={prob.meta['n']} d={prob.meta['d']} mu={prob.mu:.3g} l={prob.l:.3g}")
    args.out_dir.mkdir(parents=True, exist_ok=True)
    results = []
    for item in ("gd", "nagd", "rmpe5", {"name": "aa", "m": 3}, {"name": "aa_cheby", "m": 3}):
        s = SolverSpec.from_any(item)
        tr = run_solver(s, prob, x0, args.horizon, args.tol)
        results.append(SolverResult(s.label, tr, 0.0, tr.iterations_to(args.tol)))
        write_run_trace(args.out_dir / f"trace_{s.label}.csv", tr)
        hit = tr.iterations_to(args.tol)
        print(f"{s.label:>12}: {'DNF' if hit is None else hit} ({tr.status}, final {tr.grad_norms[-1]:.3e})")
    print("ranking:", ", ".join(ranking(results)))


if __name__ == "__main__":
    main()
