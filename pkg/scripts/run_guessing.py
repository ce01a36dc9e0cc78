"""Guessing search vs a fixed run with misestimated (mu', L') on a random quadratic."""
import argparse
import math

import numpy as np

from accel.chebyshev import beta_schedule
from accel.guessing import GuessConfig, run_guessing
from accel.problems import quadratic_generate
from accel.solvers import SolverConfig, run_anderson


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=50)
    ap.add_argument("--mu", type=float, default=1.0)
    ap.add_argument("--l", type=float, default=10.0)
    ap.add_argument("--factor", type=float, default=10.0, help="mu' = mu/factor, L' = factor*L")
    ap.add_argument("--tol", type=float, default=1e-6)
    ap.add_argument("--budget", type=int, default=None)
    ap.add_argument("--m", type=int, default=0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    mu_p, l_p = args.mu / args.factor, args.l * args.factor
    b = l_p / mu_p
    kappa = args.l / args.mu
    budget = args.budget or math.floor(10 * (math.sqrt(kappa) * math.log(1 / args.tol)
                                             + math.sqrt(kappa) * (math.log(kappa) * math.log(b)) ** 2))
    p = quadratic_generate(args.d, args.mu, args.l, seed=args.seed)
    x0 = np.ones(args.d)
    tr = run_guessing(p.objective(), x0, GuessConfig(delta=mu_p, b_range=b, budget=budget, m=args.m,
                                                     grad_tol=args.tol))
    print(f"budget {budget}; guessing ran {tr.iterations} iterations, {tr.grad_evals} gradient evaluations")
    for r in tr.records:
        flag = " restored" if r.restored else ""
        print(f"  i={r.i} j={r.j} [{r.mu:.3g}, {r.l:.3g}] lengths={r.lengths} "
              f"{r.grad_before:.2e} -> {r.grad_after:.2e}{flag}")
    for evals in sorted({tr.grad_evals, budget}):
        h = max(1, evals - 2)
        cfg = SolverConfig(m=args.m, lam=2 / (l_p + mu_p), mixing=beta_schedule(mu_p, l_p, h), horizon=h)
        fixed = run_anderson(p.objective(), x0, cfg)
        print(f"fixed [{mu_p:g}, {l_p:g}] with {len(fixed)} evaluations: final {fixed.grad_norms[-1]:.3e}")
    print(f"guessing final {tr.final_grad_norm:.3e}")


if __name__ == "__main__":
    main()
