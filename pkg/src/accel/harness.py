"""Experiment configs and runners shared by the CLI and the scripts."""
from __future__ import annotations

import math
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .chebyshev import beta_schedule, horizon_for_tolerance
from .errors import InputError
from .io import load_problem
from .problems import (
    Objective,
    QuadraticProblem,
    bundled_dataset_path,
    load_dataset_csv,
    logistic_objective,
    quadratic_generate,
    with_intercept,
)
from .solvers import RunTrace, SolverConfig, run_anderson, run_gd, run_nagd, run_rmpe

SOLVER_NAMES = ("gd", "nagd", "aa", "aa_cheby", "rmpe")
PROBLEM_KINDS = ("quadratic", "quadratic_file", "logistic")
SEED_ENV = "ACCEL_SEED"


def _take(d: dict, allowed: set, where: str) -> dict:
    extra = set(d) - allowed
    if extra:
        raise InputError(f"{where}: unknown keys {sorted(extra)}")
    return d


@dataclass
class ProblemSpec:
    kind: str = "quadratic"
    d: int = 100
    mu: float = 1.0
    l: float = 500.0
    mode: str = "spectrum"
    path: Optional[str] = None
    label_column: str = "y"
    ridge: float = 0.0
    standardize: bool = True
    intercept: bool = True

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemSpec":
        if not isinstance(d, dict):
            raise InputError("problem must be an object")
        d = dict(d)
        kind = d.pop("type", d.pop("kind", "quadratic"))
        d.pop("seed", None)     # the experiment seed is top-level
        if kind not in PROBLEM_KINDS:
            raise InputError(f"problem type must be one of {PROBLEM_KINDS}, got {kind!r}")
        if kind == "logistic" and "csv" in d:
            d["path"] = d.pop("csv")
        _take(d, {f for f in cls.__dataclass_fields__ if f != "kind"}, "problem")
        spec = cls(kind=kind, **d)
        if kind == "quadratic_file" and not spec.path:
            raise InputError("quadratic_file problem needs a path")
        return spec


@dataclass
class Problem:
    objective: Objective
    mu: float
    l: float
    meta: dict
    quadratic: Optional[QuadraticProblem] = None


def build_problem(spec: ProblemSpec, seed: int, base: Path = Path(".")) -> Problem:
    if spec.kind == "quadratic":
        p = quadratic_generate(spec.d, spec.mu, spec.l, seed=seed, mode=spec.mode)
        return Problem(p.objective(), p.mu, p.l, _quad_meta(p, "quadratic"), p)
    if spec.kind == "quadratic_file":
        p = load_problem(_resolve(spec.path, base))
        return Problem(p.objective(), p.mu, p.l, _quad_meta(p, "quadratic_file"), p)
    path = _resolve(spec.path, base) if spec.path else bundled_dataset_path()
    ds = load_dataset_csv(path, spec.label_column, spec.standardize)
    if spec.intercept:
        ds = with_intercept(ds)
    obj = logistic_objective(ds, spec.ridge)
    meta = {"kind": "logistic", "d": ds.d, "n": ds.n, "mu": obj.known_mu, "l": obj.known_l,
            "kappa": obj.known_l / obj.known_mu, "path": str(path)}
    return Problem(obj, obj.known_mu, obj.known_l, meta)


def _quad_meta(p: QuadraticProblem, kind: str) -> dict:
    return {"kind": kind, "d": p.d, "mu": p.mu, "l": p.l, "kappa": p.l / p.mu, "seed": p.seed}


def _resolve(path, base: Path) -> Path:
    p = Path(path)
    return p if p.is_absolute() else base / p


@dataclass
class SolverSpec:
    name: str
    label: str = ""
    m: int = 3
    lam: Optional[float] = None
    beta: float = 1.0
    cheby_horizon: Optional[int] = None
    step: Optional[float] = None
    k: int = 5
    reg: float = 1e-10

    @classmethod
    def from_any(cls, item) -> "SolverSpec":
        if isinstance(item, str):
            item = {"name": item}
        if not isinstance(item, dict) or "name" not in item:
            raise InputError(f"solver entry {item!r} needs a name")
        d = dict(item)
        if d["name"] == "rmpe5":
            d["name"] = "rmpe"
            d.setdefault("k", 5)
        if d["name"] not in SOLVER_NAMES:
            raise InputError(f"solver must be one of {SOLVER_NAMES}, got {d['name']!r}")
        _take(d, set(cls.__dataclass_fields__), f"solver {d['name']}")
        spec = cls(**d)
        if not spec.label:
            spec.label = {"aa": f"aa_m{spec.m}", "aa_cheby": f"aa_cheby_m{spec.m}",
                          "rmpe": f"rmpe{spec.k}"}.get(spec.name, spec.name)
        return spec


@dataclass
class ExperimentConfig:
    problem: ProblemSpec
    solvers: list
    horizon: int = 20000
    grad_tol: Optional[float] = 1e-6
    seed: int = 0
    out_dir: str = "runs/compare"
    snapshot_iterates: bool = False
    x0: Optional[list] = None

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise InputError("config must be a JSON object")
        _take(d, set(cls.__dataclass_fields__), "config")
        if "problem" not in d:
            raise InputError("config needs a problem")
        solvers = d.get("solvers")
        if not solvers:
            raise InputError("config needs at least one solver")
        cfg = cls(
            problem=ProblemSpec.from_dict(d["problem"]),
            solvers=[SolverSpec.from_any(s) for s in solvers],
            horizon=int(d.get("horizon", 20000)),
            grad_tol=d.get("grad_tol", 1e-6),
            seed=effective_seed(d.get("seed", 0)),
            out_dir=str(d.get("out_dir", "runs/compare")),
            snapshot_iterates=bool(d.get("snapshot_iterates", False)),
            x0=d.get("x0"),
        )
        labels = [s.label for s in cfg.solvers]
        if len(set(labels)) != len(labels):
            raise InputError(f"solver labels must be unique, got {labels}")
        if cfg.horizon < 0:
            raise InputError("horizon must be >= 0")
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)


def effective_seed(config_seed) -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is not None and raw.strip():
        try:
            return int(raw)
        except ValueError:
            raise InputError(f"{SEED_ENV}={raw!r} is not an integer") from None
    return int(config_seed)


def start_point(problem: Problem, x0) -> np.ndarray:
    if x0 is None:
        return np.zeros(problem.objective.dim)
    x = np.asarray(x0, dtype=float)
    if x.shape != (problem.objective.dim,):
        raise InputError(f"x0 has length {x.size}, problem dimension is {problem.objective.dim}")
    return x


def run_solver(spec: SolverSpec, problem: Problem, x0, horizon: int,
               grad_tol: Optional[float], snapshot: bool = False) -> RunTrace:
    obj, mu, l = problem.objective, problem.mu, problem.l
    lam = spec.lam if spec.lam is not None else 2.0 / (l + mu)
    if spec.name == "gd":
        return run_gd(obj, x0, step=spec.step, horizon=horizon, grad_tol=grad_tol, snapshot=snapshot)
    if spec.name == "nagd":
        return run_nagd(obj, x0, mu=mu, l=l, horizon=horizon, grad_tol=grad_tol, snapshot=snapshot)
    if spec.name == "rmpe":
        return run_rmpe(obj, x0, k=spec.k, horizon=horizon, grad_tol=grad_tol, step=spec.step,
                        reg=spec.reg, snapshot=snapshot)
    if spec.name == "aa":
        cfg = SolverConfig(m=spec.m, lam=lam, mixing=spec.beta, horizon=horizon,
                           grad_tol=grad_tol, snapshot=snapshot)
        return run_anderson(obj, x0, cfg, name=spec.label)
    ch = spec.cheby_horizon or default_cheby_horizon(obj, x0, mu, l, horizon, grad_tol)
    cfg = SolverConfig(m=spec.m, lam=lam, mixing=beta_schedule(mu, l, ch), horizon=horizon,
                       grad_tol=grad_tol, snapshot=snapshot)
    return run_anderson(obj, x0, cfg, name=spec.label)


def default_cheby_horizon(obj: Objective, x0, mu: float, l: float, horizon: int,
                          grad_tol: Optional[float]) -> int:
    """Schedule length whose m = 0 guarantee reaches grad_tol from x0 (else the run horizon)."""
    if grad_tol:
        g0 = float(np.linalg.norm(obj.grad_fn(x0)))
        if g0 > grad_tol:
            return horizon_for_tolerance(l / mu, grad_tol / g0)
    return max(1, horizon)


@dataclass
class SolverResult:
    label: str
    trace: RunTrace
    wall_time: float
    iterations_to_tol: Optional[int]

    def summary(self) -> dict:
        return {
            "label": self.label,
            "solver": self.trace.solver,
            "iterations_to_tol": self.iterations_to_tol if self.iterations_to_tol is not None else "DNF",
            "final_grad_norm": self.trace.grad_norms[-1] if self.trace.grad_norms else None,
            "iterations": self.trace.last_t,
            "status": self.trace.status,
            "wall_time": self.wall_time,
            "notes": list(self.trace.notes),
        }


def run_comparison(cfg: ExperimentConfig, base: Path = Path(".")):
    """Run every configured solver from the same start. Returns (problem, [SolverResult])."""
    problem = build_problem(cfg.problem, cfg.seed, base)
    x0 = start_point(problem, cfg.x0)
    results = []
    for spec in cfg.solvers:
        t0 = time.perf_counter()
        tr = run_solver(spec, problem, x0, cfg.horizon, cfg.grad_tol, cfg.snapshot_iterates)
        wall = time.perf_counter() - t0
        hit = tr.iterations_to(cfg.grad_tol) if cfg.grad_tol is not None else None
        results.append(SolverResult(spec.label, tr, wall, hit))
    return problem, results


def ranking(results, key=lambda r: r.iterations_to_tol) -> list:
    """Labels ordered by iterations-to-tolerance, DNF last."""
    return [r.label for r in sorted(results, key=lambda r: math.inf if key(r) is None else key(r))]
