"""accel generate | compare | guess | verify"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .chebyshev import beta_schedule
from .errors import AccelError, FormatError, InputError
from .guessing import GuessConfig, run_guessing
from .harness import (
    ExperimentConfig,
    ProblemSpec,
    SolverSpec,
    build_problem,
    effective_seed,
    ranking,
    run_comparison,
    run_solver,
    start_point,
)
from .io import save_problem, write_json, write_run_trace, write_trace_csv
from .problems import QuadraticProblem, quadratic_generate
from .solvers import SolverConfig, run_anderson, run_gd, run_nagd
from .verify import (
    GeneralBoundParams,
    check_cheby_bound,
    check_gmres_equivalence,
    check_general_bound,
    check_linear_contraction,
    check_residual_recursion,
    estimate_gamma,
)

ORACLES = ("recursion", "gmres", "cheby_bound", "contraction", "general_bound")


def _load_config(path) -> tuple[dict, Path]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputError(f"config file {path} not found") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: config must be a JSON object")
    return data, path.resolve().parent


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args) -> int:
    cfg, _ = _load_config(args.config) if args.config else ({}, Path("."))
    for key in ("d", "mu", "l", "seed", "mode", "out"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    unknown = set(cfg) - {"d", "mu", "l", "seed", "mode", "out"}
    if unknown:
        raise InputError(f"generate: unknown keys {sorted(unknown)}")
    if "d" not in cfg or "out" not in cfg:
        raise InputError("generate needs d and out")
    seed = effective_seed(cfg.get("seed", 0))
    p = quadratic_generate(int(cfg["d"]), float(cfg.get("mu", 1.0)), float(cfg.get("l", 10.0)),
                           seed=seed, mode=cfg.get("mode", "spectrum"))
    out = Path(cfg["out"])
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    save_problem(p, out)
    print(f"wrote {out}: d={p.d} mu={p.mu:g} l={p.l:g} kappa={p.l / p.mu:g}")
    return 0


def cmd_compare(args) -> int:
    raw, base = _load_config(args.config)
    cfg = ExperimentConfig.from_dict(raw)
    if args.out_dir:
        cfg.out_dir = args.out_dir
    problem, results = run_comparison(cfg, base)
    out = _out_dir(cfg.out_dir)
    write_json(out / "effective_config.json", cfg.to_dict())
    for r in results:
        write_run_trace(out / f"trace_{r.label}.csv", r.trace)
    summary = {
        "problem": problem.meta,
        "grad_tol": cfg.grad_tol,
        "horizon": cfg.horizon,
        "m_values": sorted({s.m for s in cfg.solvers if s.name in ("aa", "aa_cheby")}),
        "solvers": [r.summary() for r in results],
        "ranking": ranking(results),
    }
    write_json(out / "summary.json", summary)
    plot = {"x_label": "iteration", "y_label": "log10 grad norm",
            "series": {r.label: [math.log10(g) if g > 0 else None for g in r.trace.grad_norms]
                       for r in results}}
    write_json(out / "plot_data.json", plot)
    for r in results:
        hit = r.iterations_to_tol if r.iterations_to_tol is not None else "DNF"
        print(f"{r.label:>16}: {hit} iterations ({r.trace.status}, final {r.trace.grad_norms[-1]:.3e})")
    return 0


def _fixed_counterpart(inner: str, m: int, problem, x0, mu: float, l: float, evals: int):
    """Same solver family with fixed (mu, l), allowed ``evals`` gradient evaluations."""
    obj = problem.objective
    lam = 2.0 / (l + mu)
    if inner in ("anderson_cheby", "anderson"):
        h = max(0, evals - 2)
        mixing = beta_schedule(mu, l, max(1, h)) if inner == "anderson_cheby" else 1.0
        return run_anderson(obj, x0, SolverConfig(m=m, lam=lam, mixing=mixing, horizon=h), name=f"fixed_{inner}")
    if inner == "gd":
        return run_gd(obj, x0, step=lam, horizon=max(0, evals - 1))
    return run_nagd(obj, x0, mu=mu, l=l, horizon=max(0, (evals - 1) // 2))


def cmd_guess(args) -> int:
    raw, base = _load_config(args.config)
    allowed = {"seed", "problem", "guess", "baseline", "out_dir", "x0"}
    if set(raw) - allowed:
        raise InputError(f"guess: unknown keys {sorted(set(raw) - allowed)}")
    if "problem" not in raw or "guess" not in raw:
        raise InputError("guess config needs problem and guess sections")
    seed = effective_seed(raw.get("seed", 0))
    pspec = ProblemSpec.from_dict(raw["problem"])
    g = raw["guess"]
    if not isinstance(g, dict):
        raise InputError("guess section must be an object")
    try:
        gcfg = GuessConfig(**g)
    except TypeError as exc:
        raise InputError(f"guess: {exc}") from None
    bl = raw.get("baseline", {})
    mu_f = float(bl.get("mu", gcfg.delta))
    l_f = float(bl.get("l", gcfg.delta * gcfg.b_range))
    out = _out_dir(args.out_dir or raw.get("out_dir", "runs/guess"))
    problem = build_problem(pspec, seed, base)
    x0 = start_point(problem, raw.get("x0"))
    gtr = run_guessing(problem.objective, x0, gcfg)
    fixed = _fixed_counterpart(gcfg.inner, gcfg.m, problem, x0, mu_f, l_f, gtr.grad_evals)
    write_json(out / "effective_config.json", {"seed": seed, "problem": asdict(pspec), "guess": asdict(gcfg),
                                               "baseline": {"mu": mu_f, "l": l_f}, "x0": raw.get("x0")})
    evals = [1] + [h[1] for h in gtr.history]
    grads = [gtr.grad_norm0] + [h[2] for h in gtr.history]
    fvals = [float(problem.objective.value_fn(x0))] + [h[3] for h in gtr.history]
    # guessing trace rows are indexed by gradient evaluations spent
    write_trace_csv(out / "trace_guessing.csv", grads, fvals, [None] * len(grads), iters=evals)
    write_run_trace(out / "trace_fixed.csv", fixed)
    write_json(out / "guess_trace.json", {
        "records": [asdict(r) for r in gtr.records],
        "history": [{"iterations": h[0], "grad_evals": h[1], "grad_norm": h[2], "f_value": h[3]}
                    for h in gtr.history],
        "j_range": list(gtr.j_range), "coverage_violated": gtr.coverage_violated, "notes": gtr.notes,
    })
    summary = {
        "problem": problem.meta,
        "guessing": {"final_grad_norm": gtr.final_grad_norm, "best_grad_norm": gtr.best_grad_norm,
                     "iterations": gtr.iterations, "grad_evals": gtr.grad_evals,
                     "coverage_violated": gtr.coverage_violated, "inner_runs": len(gtr.history)},
        "fixed": {"mu": mu_f, "l": l_f, "final_grad_norm": fixed.grad_norms[-1],
                  "grad_evals": len(fixed) if fixed.solver != "nagd" else 2 * len(fixed) - 1,
                  "status": fixed.status},
    }
    write_json(out / "summary.json", summary)
    print(f"guessing: final {gtr.final_grad_norm:.3e} after {gtr.grad_evals} gradient evaluations"
          + (" (coverage violated)" if gtr.coverage_violated else ""))
    print(f"fixed [{mu_f:g}, {l_f:g}]: final {fixed.grad_norms[-1]:.3e}")
    return 0


def _need_quadratic(problem, oracle: str) -> QuadraticProblem:
    if problem.quadratic is None:
        raise InputError(f"oracle {oracle} needs a quadratic problem")
    return problem.quadratic


def run_oracle(oracle: str, problem, params: dict, x0):
    params = dict(params)
    if oracle == "recursion":
        p = _need_quadratic(problem, oracle)
        horizon = int(params.get("horizon", 30))
        sched = params.get("schedule", "cheby")
        betas = beta_schedule(p.mu, p.l, horizon) if sched == "cheby" else float(sched)
        return check_residual_recursion(p, x0, int(params.get("m", 3)), betas, horizon)
    if oracle == "gmres":
        p = _need_quadratic(problem, oracle)
        return check_gmres_equivalence(p, int(params.get("horizon", p.d)), x0)
    if oracle == "cheby_bound":
        p = _need_quadratic(problem, oracle)
        kappa = p.l / p.mu
        default_h = math.ceil(2 * (math.sqrt(kappa) + 1) * math.log(2 / 1e-6))
        horizon = int(params.get("horizon", default_h))
        m = int(params.get("m", 0))
        if params.get("centered", True):
            # same error dynamics, without cancellation in A x - b
            x0 = x0 - p.solution()
            p = QuadraticProblem(p.a, np.zeros(p.d), p.mu, p.l, p.seed, p.eigenvalues)
        cfg = SolverConfig(m=m, lam=1.0, mixing=beta_schedule(p.mu, p.l, horizon), horizon=horizon)
        tr = run_anderson(p.objective(), x0, cfg, name="anderson_cheby")
        return check_cheby_bound(p, tr, m)
    if oracle == "contraction":
        p = _need_quadratic(problem, oracle)
        horizon = int(params.get("horizon", 200))
        g0 = float(np.linalg.norm(p.a @ x0 - p.b))
        tol = float(params.get("grad_tol_rel", 1e-8)) * g0
        spec = SolverSpec.from_any({"name": params.get("solver", "aa"), "m": int(params.get("m", 3))})
        tr = run_solver(spec, problem, x0, horizon, tol)
        return check_linear_contraction(p, tr)
    if oracle == "general_bound":
        m = int(params.get("m", 3))
        horizon = int(params.get("horizon", 200))
        spec = SolverSpec.from_any({"name": "aa", "m": m, "beta": float(params.get("beta", 1.0))})
        tr = run_solver(spec, problem, x0, horizon, params.get("grad_tol", 1e-10), snapshot=True)
        gamma = params.get("gamma", "auto")
        if gamma == "auto":
            pts = tr.iterates[:: max(1, len(tr.iterates) // 15)]
            gamma = estimate_gamma(problem.objective, pts)
        bp = GeneralBoundParams(float(gamma), problem.mu, problem.l, spec.beta)
        rep = check_general_bound(tr, bp, m)
        rep.notes.append(f"gamma={float(gamma):.6g}")
        return rep
    raise InputError(f"unknown oracle {oracle!r}; expected one of {ORACLES}")


def cmd_verify(args) -> int:
    raw, base = _load_config(args.config)
    allowed = {"seed", "problem", "oracle", "params", "out", "x0"}
    if set(raw) - allowed:
        raise InputError(f"verify: unknown keys {sorted(set(raw) - allowed)}")
    oracle = args.oracle or raw.get("oracle")
    if oracle not in ORACLES:
        raise InputError(f"unknown oracle {oracle!r}; expected one of {ORACLES}")
    if "problem" not in raw:
        raise InputError("verify config needs a problem")
    seed = effective_seed(raw.get("seed", 0))
    problem = build_problem(ProblemSpec.from_dict(raw["problem"]), seed, base)
    x0 = start_point(problem, raw.get("x0"))
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise InputError("params must be an object")
    rep = run_oracle(oracle, problem, params, x0)
    out = Path(args.out or raw.get("out", "report.json"))
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    data = rep.to_dict()
    data["problem"] = problem.meta
    data["params"] = params
    write_json(out, data)
    verdict = "pass" if rep.passed else "FAIL"
    kind = " (informational)" if rep.informational else ""
    print(f"{oracle}: {verdict}{kind}, min slack {rep.min_slack:.3e}, tolerance {rep.tolerance:.3e} -> {out}")
    return 0 if rep.passed or rep.informational else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="accel", description="Anderson acceleration experiments.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random quadratic problem file")
    g.add_argument("--config")
    g.add_argument("--d", type=int)
    g.add_argument("--mu", type=float)
    g.add_argument("--l", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--mode", choices=("spectrum", "gram"))
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("compare", help="run several solvers on one problem")
    c.add_argument("--config", required=True)
    c.add_argument("--out-dir")
    c.set_defaults(func=cmd_compare)

    q = sub.add_parser("guess", help="parameter search against a fixed-parameter run")
    q.add_argument("--config", required=True)
    q.add_argument("--out-dir")
    q.set_defaults(func=cmd_guess)

    v = sub.add_parser("verify", help="run one oracle and write its report")
    v.add_argument("--config", required=True)
    v.add_argument("--oracle")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FormatError) as exc:
        print(f"accel: error: {exc}", file=sys.stderr)
        return 2
    except (AccelError, OSError) as exc:
        print(f"accel: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
