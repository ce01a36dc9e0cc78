"""Executable checks of the identities and bounds satisfied by Anderson runs."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Union

import numpy as np

from .chebyshev import BetaSchedule, beta_schedule, contraction_ratio
from .errors import InputError
from .linalg import EPS, project_complement
from .problems import Objective, QuadraticProblem
from .solvers import RunTrace, SolverConfig, gmres_solve, run_anderson


@dataclass
class OracleReport:
    name: str
    records: list = field(default_factory=list)    # dicts with t, lhs, rhs, slack
    tolerance: float = 0.0
    informational: bool = False
    notes: list = field(default_factory=list)
    profile: list = field(default_factory=list)    # extra per-t data that is not judged

    def add(self, t: int, lhs: float, rhs: float) -> None:
        self.records.append({"t": int(t), "lhs": float(lhs), "rhs": float(rhs), "slack": float(rhs - lhs)})

    @property
    def min_slack(self) -> float:
        return min((r["slack"] for r in self.records), default=math.inf)

    @property
    def passed(self) -> bool:
        return self.min_slack >= -self.tolerance

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        out["min_slack"] = self.min_slack if self.records else None
        return out


@dataclass(frozen=True)
class GeneralBoundParams:
    gamma: float
    mu: float
    l: float
    beta: float = 1.0
    kappa_tilde: Optional[float] = None

    def __post_init__(self):
        vals = [self.gamma, self.mu, self.l, self.beta]
        if self.kappa_tilde is not None:
            vals.append(self.kappa_tilde)
        if not all(math.isfinite(v) for v in vals):
            raise InputError("bound parameters must be finite")
        if self.gamma < 0 or not (0 <= self.mu <= self.l):
            raise InputError("need gamma >= 0 and 0 <= mu <= l")


def _residual(p: QuadraticProblem, x) -> np.ndarray:
    return p.b - p.a @ x


def check_residual_recursion(p: QuadraticProblem, x0, m: int,
                             betas: Union[float, BetaSchedule], horizon: int) -> OracleReport:
    """AA (lam = 1) next to the chain F_{t+1} = (I - beta_t A) P_t F_t.

    The chain is driven only by its own residuals: P_t projects onto the
    orthogonal complement of [F_t - F_{t-1}, ..., F_t - F_{t-m_t}] built from
    chain values, recomputed from scratch every step.
    """
    cfg = SolverConfig(m=m, lam=1.0, mixing=betas, horizon=horizon, snapshot=True)
    tr = run_anderson(p.objective(), x0, cfg)
    xs = tr.iterates
    chain = [_residual(p, xs[0])]
    chain.append(chain[0] - p.a @ chain[0])     # x_1 = G(x_0) gives F_1 = (I - A) F_0
    f1 = float(np.linalg.norm(_residual(p, xs[1]))) if len(xs) > 1 else 0.0
    rep = OracleReport("recursion", tolerance=1e-9 * f1)
    for t in range(1, len(xs) - 1):
        ft = chain[t]
        mt = min(m, t)
        if mt:
            bmat = np.column_stack([ft - chain[t - i] for i in range(1, mt + 1)])
            pf = project_complement(bmat, ft)
        else:
            pf = ft
        chain.append(pf - cfg.beta_at(t) * (p.a @ pf))
        rep.add(t + 1, float(np.linalg.norm(_residual(p, xs[t + 1]) - chain[t + 1])), 0.0)
    if tr.status != "horizon_reached":
        rep.notes.append(f"AA run ended early: {tr.status}")
    return rep


def check_gmres_equivalence(p: QuadraticProblem, horizon: int, x0=None) -> OracleReport:
    """x_{t+1} of untruncated AA (lam = beta = 1) against G applied to GMRES iterate x_t."""
    x0 = np.zeros(p.d) if x0 is None else np.asarray(x0, dtype=float)
    steps = min(horizon, p.d)
    cfg = SolverConfig(m=max(horizon, 1), lam=1.0, mixing=1.0, horizon=steps, snapshot=True)
    tr = run_anderson(p.objective(), x0, cfg)
    xg = gmres_solve(p.a, p.b, x0, steps)
    rep = OracleReport("gmres", tolerance=0.0)
    prev = float(np.linalg.norm(_residual(p, xg[0])))
    decreasing = prev > 0
    for t, xt in enumerate(xg):
        r = float(np.linalg.norm(_residual(p, xt)))
        if t > 0:
            decreasing = decreasing and 0.0 < r < prev
        prev = r
        if t + 1 >= len(tr.iterates):
            break
        if not decreasing:
            rep.notes.append(f"t={t}: GMRES residuals not strictly decreasing, step excluded")
            continue
        target = xt + _residual(p, xt)
        gap = float(np.linalg.norm(tr.iterates[t + 1] - target))
        rep.add(t, gap, 1e-8 * (1.0 + float(np.linalg.norm(xt))))
    return rep


def _rounding_floor(p: QuadraticProblem, x) -> float:
    # size of the error in evaluating A x - b itself
    return 8.0 * EPS * (p.l * float(np.linalg.norm(x)) + float(np.linalg.norm(p.b))) * math.sqrt(p.d)


def check_cheby_bound(p: QuadraticProblem, trace: RunTrace, m: Optional[int] = None) -> OracleReport:
    """||grad f(x_{T+1})|| <= 2 ratio(kappa)^{T/2} ||grad f(x_1)|| at the schedule end.

    Judged only at t = T; the per-t profile is kept for inspection. With
    m > 0 the report is informational.
    """
    sched = trace.meta.get("schedule")
    if sched is None:
        raise InputError("trace was not produced with a Chebyshev schedule")
    if not (math.isclose(sched["mu"], p.mu, rel_tol=1e-12) and math.isclose(sched["l"], p.l, rel_tol=1e-12)):
        raise InputError(f"schedule [{sched['mu']}, {sched['l']}] does not match problem [{p.mu}, {p.l}]")
    if trace.meta.get("lam") != 1.0:
        raise InputError("bound applies to lam = 1 runs")
    m = trace.meta.get("m", 0) if m is None else m
    horizon = sched["horizon"]
    g = trace.grad_norms
    if len(g) < 2:
        raise InputError("trace too short")
    kappa = p.l / p.mu
    rep = OracleReport("cheby_bound", informational=m > 0)
    for t in range(1, len(g) - 1):
        rep.profile.append({"t": t, "ratio": g[t + 1] / g[1] if g[1] else 0.0,
                            "bound": 2.0 * contraction_ratio(kappa) ** (t / 2)})
    if horizon + 1 >= len(g):
        rep.notes.append(f"trace ended at t={len(g) - 1} before the schedule end {horizon + 1}")
        t_end = len(g) - 2
    else:
        t_end = horizon
    rhs = 2.0 * contraction_ratio(kappa) ** (t_end / 2) * g[1]
    floor = _rounding_floor(p, trace.x_final) if trace.x_final is not None else 0.0
    rep.tolerance = max(1e-9 * rhs, floor)
    rep.add(t_end, g[t_end + 1], rhs)
    if m > 0:
        rep.notes.append("m > 0: bound assumes the window condition, which is not checked")
    return rep


def check_linear_contraction(p: QuadraticProblem, trace: RunTrace) -> OracleReport:
    """||grad f(x_{t+1})|| <= (1 - 2mu/(l+mu)) ||grad f(x_t)|| + 1e-12 ||grad f(x_1)||."""
    lam = trace.meta.get("lam", trace.meta.get("step"))
    target = 2.0 / (p.l + p.mu)
    if lam is None or not math.isclose(lam, target, rel_tol=1e-12):
        raise InputError(f"contraction needs lam = 2/(l+mu) = {target}, trace has {lam}")
    if "schedule" in trace.meta or trace.meta.get("beta", 1.0) != 1.0:
        raise InputError("contraction needs constant beta = 1")
    g = trace.grad_norms
    q = 1.0 - 2.0 * p.mu / (p.l + p.mu)
    floor = 1e-12 * g[1] if len(g) > 1 else 0.0
    rep = OracleReport("contraction")
    for t in range(len(g) - 1):
        rep.add(t, g[t + 1], q * g[t] + floor)
    return rep


def check_general_bound(trace: RunTrace, params: GeneralBoundParams, m: int) -> OracleReport:
    """Per-step envelope c1 D^2 + c2 D ||grad_t|| + (1 - c3) ||grad_t|| (informational)."""
    if trace.iterates is None:
        raise InputError("general bound needs iterate snapshots")
    kt = params.kappa_tilde
    if kt is None:
        kt = max((k for k in trace.kappa_tilde if k is not None), default=0.0)
    s = params.l + params.mu
    c1 = 3.0 * kt ** 2 * params.gamma * m / s ** 2
    c2 = 2.0 * kt * params.beta * params.gamma * math.sqrt(m) / s ** 2
    c3 = params.beta * 2.0 * params.mu / s
    xs, g = trace.iterates, trace.grad_norms
    rep = OracleReport("general_bound", informational=True)
    rep.notes.append(f"c1={c1:.6g} c2={c2:.6g} c3={c3:.6g} kappa_tilde={kt:.6g}")
    for t in range(len(g) - 1):
        mt = min(m, t)
        delta = max((float(np.linalg.norm(xs[t] - xs[t - i])) for i in range(1, mt + 1)), default=0.0)
        rep.add(t, g[t + 1], c1 * delta ** 2 + c2 * delta * g[t] + (1.0 - c3) * g[t])
    return rep


def fd_hessian(obj: Objective, x, h: float = 1e-5) -> np.ndarray:
    """Central-difference Hessian from gradients, symmetrized."""
    x = np.asarray(x, dtype=float)
    cols = []
    for k in range(obj.dim):
        e = np.zeros(obj.dim)
        step = h * max(1.0, abs(x[k]))
        e[k] = step
        cols.append((obj.grad_fn(x + e) - obj.grad_fn(x - e)) / (2.0 * step))
    hess = np.column_stack(cols)
    return 0.5 * (hess + hess.T)


def estimate_gamma(obj: Objective, points, min_sep: float = 1e-3) -> float:
    """Largest ||H(a) - H(b)|| / ||a - b|| over pairs of sampled points.

    Pairs closer than ``min_sep`` times the largest separation are skipped,
    since finite-difference noise dominates there.
    """
    pts = [np.asarray(p, dtype=float) for p in points]
    if len(pts) < 2:
        return 0.0
    hs = [fd_hessian(obj, p) for p in pts]
    dists = [[float(np.linalg.norm(a - b)) for b in pts] for a in pts]
    far = max(max(r) for r in dists)
    best = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = dists[i][j]
            if d <= min_sep * far or d == 0.0:
                continue
            best = max(best, float(np.linalg.norm(hs[i] - hs[j], 2)) / d)
    return best


def cheby_run(p: QuadraticProblem, x0, m: int, horizon: int) -> RunTrace:
    """AA with lam = 1 and the schedule matching p's spectrum, run to x_{T+1}."""
    cfg = SolverConfig(m=m, lam=1.0, mixing=beta_schedule(p.mu, p.l, horizon), horizon=horizon)
    return run_anderson(p.objective(), x0, cfg, name="anderson_cheby")
