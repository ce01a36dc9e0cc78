"""Search over guesses of (mu, kappa) for solvers that need them.

The outer loop raises the condition-number guess kappa_i = e^{i+2}; for each
it sweeps the spectrum floor mu_i = e^j delta. Each (i, j) pair runs the inner
solver for geometrically growing lengths t_i while the observed gradient
reduction keeps pace with the rate that kappa_i promises.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .chebyshev import beta_schedule, contraction_ratio
from .errors import InputError
from .problems import Objective
from .solvers import SolverConfig, run_anderson, run_gd, run_nagd
from .solvers.trace import DIVERGED

INNER_SOLVERS = ("anderson_cheby", "anderson", "gd", "nagd")


@dataclass
class GuessConfig:
    delta: float
    b_range: float
    budget: int
    inner: str = "anderson_cheby"
    m: int = 0
    max_outer: Optional[int] = None
    grad_tol: Optional[float] = None
    # j = 0 puts mu_i = delta on the grid; without it [delta, e*delta) is never covered
    j_start: int = 0

    def __post_init__(self):
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise InputError("delta must be a finite positive number")
        if not self.b_range > 1:
            raise InputError("b_range must be > 1")
        if self.budget < 1:
            raise InputError("budget must be >= 1")
        if self.inner not in INNER_SOLVERS:
            raise InputError(f"inner must be one of {INNER_SOLVERS}, got {self.inner!r}")
        if self.m < 0:
            raise InputError("m must be >= 0")
        if self.j_start not in (0, 1):
            raise InputError("j_start must be 0 or 1")

    @property
    def j_count(self) -> int:
        return math.ceil(math.log(self.b_range))

    @property
    def i_count(self) -> int:
        return self.max_outer if self.max_outer is not None else self.j_count + 2


def kappa_guess(i: int) -> float:
    return math.exp(i + 2)


def mu_guess(j: int, delta: float) -> float:
    return math.exp(j) * delta


def next_length(t: int) -> int:
    return math.floor(math.e * t)


def guess_grid(cfg: GuessConfig) -> list:
    """All (i, j, mu_i, l_i) pairs the search can visit."""
    out = []
    for i in range(1, cfg.i_count + 1):
        k = kappa_guess(i)
        for j in range(cfg.j_start, cfg.j_count + 1):
            mu = mu_guess(j, cfg.delta)
            out.append((i, j, mu, mu * k))
    return out


def covering_pair(cfg: GuessConfig, mu: float, l: float):
    """First grid pair whose [mu_i, l_i] contains [mu, l], or None."""
    for i, j, mu_i, l_i in guess_grid(cfg):
        if mu_i <= mu and l <= l_i:
            return i, j, mu_i, l_i
    return None


@dataclass
class OuterRecord:
    i: int
    kappa: float
    j: int
    mu: float
    l: float
    lengths: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    restored: bool = False
    budget_stop: bool = False
    grad_before: float = 0.0
    grad_after: float = 0.0


@dataclass
class GuessTrace:
    records: list = field(default_factory=list)
    # one entry per inner run: (iterations so far, gradient evaluations so far, ||grad||, f) at its end
    history: list = field(default_factory=list)
    iterations: int = 0
    grad_evals: int = 1
    grad_norm0: float = 0.0
    best_grad_norm: float = math.inf
    x_final: Optional[np.ndarray] = None
    x_best: Optional[np.ndarray] = None
    coverage_violated: bool = False
    j_range: tuple = ()
    notes: list = field(default_factory=list)

    @property
    def final_grad_norm(self) -> float:
        return self.records[-1].grad_after if self.records else self.grad_norm0

    def evals_to(self, tol: float) -> Optional[int]:
        """Gradient evaluations spent when an inner run first ended at ||grad|| <= tol."""
        if self.grad_norm0 <= tol:
            return 1
        for _, ev, g, _ in self.history:
            if g <= tol:
                return ev
        return None

    def iterations_to(self, tol: float) -> Optional[int]:
        if self.grad_norm0 <= tol:
            return 0
        for it, _, g, _ in self.history:
            if g <= tol:
                return it
        return None


def make_inner(cfg: GuessConfig) -> Callable:
    """Inner solver (obj, x, t_i, mu_i, l_i) -> (x_new, ||grad(x_new)||, f(x_new), gradient evaluations)."""

    def finish(tr):
        if tr.status == DIVERGED or len(tr) == 0:
            return None, math.inf, math.nan, len(tr)
        # the starting gradient was already known to the caller
        return tr.x_final, tr.grad_norms[-1], tr.f_values[-1], len(tr) - 1

    def inner(obj, x, t_i, mu_i, l_i):
        lam = 2.0 / (l_i + mu_i)
        if cfg.inner == "anderson_cheby":
            sc = SolverConfig(m=cfg.m, lam=lam, mixing=beta_schedule(mu_i, l_i, t_i), horizon=t_i)
            return finish(run_anderson(obj, x, sc, name="anderson_cheby"))
        if cfg.inner == "anderson":
            sc = SolverConfig(m=cfg.m, lam=lam, mixing=1.0, horizon=t_i)
            return finish(run_anderson(obj, x, sc))
        if cfg.inner == "gd":
            return finish(run_gd(obj, x, step=lam, horizon=t_i))
        return finish(run_nagd(obj, x, mu=mu_i, l=l_i, horizon=t_i))

    return inner


def run_guessing(obj: Objective, x0, cfg: GuessConfig) -> GuessTrace:
    x = np.array(x0, dtype=float, copy=True)
    if x.shape != (obj.dim,):
        raise InputError(f"x0 has shape {x.shape}, expected ({obj.dim},)")
    f0, g0 = obj.evaluate(x)
    g, f = float(np.linalg.norm(g0)), float(f0)
    if not math.isfinite(g):
        raise InputError("gradient is not finite at x0")
    trace = GuessTrace(grad_norm0=g, best_grad_norm=g, x_final=x, x_best=x,
                       j_range=(cfg.j_start, cfg.j_count))
    if obj.known_mu is not None and obj.known_l is not None:
        if obj.known_mu < cfg.delta or obj.known_l > cfg.delta * cfg.b_range:
            trace.coverage_violated = True
            trace.notes.append(
                f"coverage violated: [{obj.known_mu:g}, {obj.known_l:g}] not inside "
                f"[{cfg.delta:g}, {cfg.delta * cfg.b_range:g}]"
            )
    inner = make_inner(cfg)
    t = 0
    for i in range(1, cfg.i_count + 1):
        kappa_i = kappa_guess(i)
        rho = contraction_ratio(kappa_i)
        for j in range(cfg.j_start, cfg.j_count + 1):
            mu_i = mu_guess(j, cfg.delta)
            rec = OuterRecord(i, kappa_i, j, mu_i, mu_i * kappa_i, grad_before=g)
            x_start, g_start, f_start = x, g, f
            x_prev, g_prev, f_prev = x, g, f
            t_i = 1
            while True:
                t_i = next_length(t_i)
                if t + t_i > cfg.budget:
                    rec.budget_stop = True
                    break
                x_prev, g_prev, f_prev = x, g, f
                x_new, g_new, f_new, used = inner(obj, x, t_i, mu_i, rec.l)
                t += t_i
                trace.grad_evals += used
                rec.lengths.append(t_i)
                if x_new is None or not math.isfinite(g_new):
                    # rejected: the iterate stays where it was
                    rec.ratios.append(math.inf)
                    rec.restored = True
                    trace.history.append((t, trace.grad_evals, g, f))
                    break
                x, g, f = x_new, g_new, f_new
                trace.history.append((t, trace.grad_evals, g, f))
                ratio = g / g_prev if g_prev > 0 else 0.0
                rec.ratios.append(ratio)
                if g < trace.best_grad_norm:
                    trace.best_grad_norm, trace.x_best = g, x
                if g_prev == 0.0 or not ratio <= 2.0 * rho ** t_i:
                    break
            if not g <= g_prev:
                x, g, f = x_prev, g_prev, f_prev
                rec.restored = True
            if not g <= g_start:
                # an earlier accepted run in this pair may itself have raised the gradient
                x, g, f = x_start, g_start, f_start
                rec.restored = True
            rec.grad_after = g
            trace.records.append(rec)
            if g == 0.0 or (cfg.grad_tol is not None and g <= cfg.grad_tol):
                trace.iterations, trace.x_final = t, x
                return trace
            if t + 2 > cfg.budget:
                trace.iterations, trace.x_final = t, x
                return trace
    trace.iterations, trace.x_final = t, x
    return trace
