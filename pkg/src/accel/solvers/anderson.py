"""Anderson acceleration with a truncated history window.

The window stores consecutive residual differences F_{j+1} - F_j in
chronological order and keeps their QR factorization up to date with one
append and (once full) one drop per iteration. The least-squares matrix
B_t = [F_t - F_{t-1}, ..., F_t - F_{t-m_t}] is that difference matrix times a
fixed 0/1 triangular pattern, so its coefficients come from a tiny m x m
problem on the R factor.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..chebyshev import BetaSchedule
from ..errors import InputError, NumericError
from ..linalg import EPS, QRFactors, empty_qr, qr_update, small_min_norm
from ..problems import Objective
from .trace import CONVERGED, DIVERGED, DIVERGENCE_FACTOR, RunTrace


@dataclass
class SolverConfig:
    """Settings for one Anderson run.

    ``mixing`` is either a constant beta or a Chebyshev schedule. Schedule
    entries are effective step sizes on the gradient, so the per-iteration
    beta is ``schedule.beta(t) / lam``; with ``lam = 1`` that is the raw
    schedule. Past the horizon the schedule cycles.
    """

    m: int = 0
    lam: float = 1.0
    mixing: Union[float, BetaSchedule] = 1.0
    horizon: Optional[int] = None
    grad_tol: Optional[float] = None
    rank_tol: float = 0.0
    snapshot: bool = False

    def __post_init__(self):
        if self.m < 0:
            raise InputError("window m must be >= 0")
        if not self.lam > 0:
            raise InputError("step lam must be > 0")
        if self.horizon is None and self.grad_tol is None:
            raise InputError("set a horizon, a gradient tolerance, or both")
        if self.horizon is not None and self.horizon < 0:
            raise InputError("horizon must be >= 0")
        if self.grad_tol is not None and self.grad_tol < 0:
            raise InputError("grad_tol must be >= 0")
        if self.rank_tol < 0:
            raise InputError("rank_tol must be >= 0")

    @property
    def chebyshev(self) -> bool:
        return isinstance(self.mixing, BetaSchedule)

    def beta_at(self, t: int) -> float:
        if isinstance(self.mixing, BetaSchedule):
            return self.mixing.beta(t) / self.lam
        return float(self.mixing)


class HistoryWindow:
    """Last m_t + 1 iterates/residuals and the QR of their residual differences."""

    def __init__(self, m: int, dim: int):
        self.m = m
        self.dim = dim
        self.xs = deque(maxlen=m + 1)
        self.fs = deque(maxlen=m + 1)
        self.dx = deque()
        self.df = deque()
        self.qr: QRFactors = empty_qr(dim)

    def __len__(self) -> int:
        return len(self.xs)

    @property
    def m_t(self) -> int:
        return len(self.xs) - 1

    def push(self, x: np.ndarray, f: np.ndarray) -> None:
        if self.xs and self.m > 0:
            drop = len(self.df) == self.m
            d_f = f - self.fs[-1]
            self.qr = qr_update(self.qr, append=d_f, drop_oldest=drop)
            if drop:
                self.dx.popleft()
                self.df.popleft()
            self.dx.append(x - self.xs[-1])
            self.df.append(d_f)
        self.xs.append(np.array(x, dtype=float, copy=True))
        self.fs.append(np.array(f, dtype=float, copy=True))

    def diff_matrix(self) -> np.ndarray:
        """Consecutive residual differences, oldest first (what ``qr`` factors)."""
        if not self.df:
            return np.zeros((self.dim, 0))
        return np.column_stack(self.df)

    def b_matrix(self) -> np.ndarray:
        """[F_t - F_{t-1}, ..., F_t - F_{t-m_t}]."""
        ft = self.fs[-1]
        cols = [ft - self.fs[-1 - i] for i in range(1, self.m_t + 1)]
        return np.column_stack(cols) if cols else np.zeros((self.dim, 0))


def _pattern(n: int) -> np.ndarray:
    # column i-1 of B_t sums the newest i consecutive differences
    c = np.arange(n)[:, None]
    i = np.arange(1, n + 1)[None, :]
    return (c >= n - i).astype(float)


@dataclass(frozen=True)
class Mixing:
    alpha: np.ndarray       # (alpha_0, ..., alpha_{m_t}), sums to 1
    gamma: np.ndarray       # weights on the stored consecutive differences
    rank: int
    min_pivot: float        # smallest retained pivot of B_t's R factor (inf if none)


def mixing_coefficients(h: HistoryWindow, rank_tol: float = 0.0) -> Mixing:
    """Minimal-norm solution of min ||F_t - sum_i alpha_i (F_t - F_{t-i})||."""
    if len(h) == 0:
        raise InputError("empty history window")
    n = len(h.df) if h.m > 0 else 0
    if n == 0:
        return Mixing(np.ones(1), np.zeros(0), 0, math.inf)
    k = min(h.dim, n)
    u = _pattern(n)
    s = h.qr.r[:k, :n] @ u
    c = h.qr.q[:, :k].T @ h.fs[-1]
    tol = rank_tol or max(h.dim, n) * EPS * float(np.max(np.linalg.norm(s, axis=0)))
    a, rank, pivot = small_min_norm(s, c, tol)
    alpha = np.concatenate([[1.0 - math.fsum(a)], a])
    return Mixing(alpha, u @ a, rank, pivot)


def anderson_step(h: HistoryWindow, beta: float, rank_tol: float = 0.0):
    """x_{t+1} = sum_i alpha_i x_{t-i} + beta sum_i alpha_i F_{t-i}.

    Evaluated in the equivalent difference form
    x_t - sum_i alpha_i (x_t - x_{t-i}) + beta (F_t - sum_i alpha_i (F_t - F_{t-i})).
    Returns (x_next, Mixing).
    """
    mix = mixing_coefficients(h, rank_tol)
    xt, ft = h.xs[-1], h.fs[-1]
    if mix.gamma.size:
        dx = np.column_stack(h.dx)
        df = np.column_stack(h.df)
        mixed = ft - df @ mix.gamma
        x_next = xt - dx @ mix.gamma + beta * mixed
    else:
        x_next = xt + beta * ft
    if not np.all(np.isfinite(x_next)):
        raise NumericError("non-finite Anderson iterate")
    return x_next, mix


def fixed_point_map(obj: Objective, lam: float, x: np.ndarray):
    """(G(x), F(x)) with F = -lam grad f(x) and G = x + F."""
    x = np.asarray(x, dtype=float)
    if x.shape != (obj.dim,):
        raise InputError(f"x has shape {x.shape}, expected ({obj.dim},)")
    f_res = -lam * np.asarray(obj.grad_fn(x), dtype=float)
    if not np.all(np.isfinite(f_res)):
        raise NumericError("non-finite gradient")
    return x + f_res, f_res


def _start(obj: Objective, x0, name: str, snapshot: bool, meta: dict):
    x = np.array(x0, dtype=float, copy=True)
    if x.shape != (obj.dim,):
        raise InputError(f"x0 has shape {x.shape}, expected ({obj.dim},)")
    return x, RunTrace(name, iterates=[] if snapshot else None, meta=meta)


def _observe(obj: Objective, trace: RunTrace, x: np.ndarray, grad_tol):
    """Evaluate, record and decide whether to stop. Returns (grad, stop)."""
    f, g = obj.evaluate(x)
    gn = float(np.linalg.norm(g))
    if not (math.isfinite(gn) and math.isfinite(f)):
        trace.status = DIVERGED
        return g, True
    trace.record(x, f, gn)
    if gn > DIVERGENCE_FACTOR * trace.grad_norms[0]:
        trace.status = DIVERGED
        return g, True
    if grad_tol is not None and gn <= grad_tol:
        trace.status = CONVERGED
        return g, True
    return g, False


def run_anderson(obj: Objective, x0, cfg: SolverConfig, name: str = "anderson") -> RunTrace:
    """Anderson acceleration: x_1 = G(x_0), then horizon steps of mixing."""
    meta = {"m": cfg.m, "lam": cfg.lam, "horizon": cfg.horizon, "grad_tol": cfg.grad_tol}
    if cfg.chebyshev:
        meta["schedule"] = {"mu": cfg.mixing.mu, "l": cfg.mixing.l, "horizon": cfg.mixing.horizon}
    else:
        meta["beta"] = float(cfg.mixing)
    x, trace = _start(obj, x0, name, cfg.snapshot, meta)
    g, stop = _observe(obj, trace, x, cfg.grad_tol)
    if stop:
        return trace
    window = HistoryWindow(cfg.m, obj.dim)
    f_res = -cfg.lam * g
    window.push(x, f_res)
    trace.set_last_beta(1.0)
    trace.set_last_alpha(np.ones(1))
    x = x + f_res
    t = 1
    while True:
        g, stop = _observe(obj, trace, x, cfg.grad_tol)
        if stop or (cfg.horizon is not None and t > cfg.horizon):
            break
        window.push(x, -cfg.lam * g)
        beta = cfg.beta_at(t)
        try:
            x, mix = anderson_step(window, beta, cfg.rank_tol)
        except NumericError:
            trace.status = DIVERGED
            break
        kt = trace.grad_norms[-1] / mix.min_pivot if mix.rank else None
        trace.set_last_beta(beta)
        trace.set_last_alpha(mix.alpha, kt)
        t += 1
    return trace
