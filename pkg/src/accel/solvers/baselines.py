"""Reference methods: gradient descent, Nesterov AGD and restarted RMPE."""
from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..errors import InputError
from ..linalg import least_squares_min_norm
from ..problems import Objective
from .anderson import _observe, _start


def _need_smoothness(obj: Objective, what: str):
    if obj.known_mu is None or obj.known_l is None:
        raise InputError(f"{what} needs mu and l; pass them explicitly")
    return obj.known_mu, obj.known_l


def _check_limits(horizon, grad_tol):
    if horizon is None and grad_tol is None:
        raise InputError("set a horizon, a gradient tolerance, or both")


def run_gd(obj: Objective, x0, step: Optional[float] = None, horizon: Optional[int] = None,
           grad_tol: Optional[float] = None, snapshot: bool = False):
    """x_{t+1} = x_t - step * grad f(x_t); default step 2/(l + mu)."""
    _check_limits(horizon, grad_tol)
    if step is None:
        mu, l = _need_smoothness(obj, "default GD step")
        step = 2.0 / (l + mu)
    if not step > 0:
        raise InputError("step must be > 0")
    x, trace = _start(obj, x0, "gd", snapshot, {"step": step, "horizon": horizon, "grad_tol": grad_tol})
    t = 0
    while True:
        g, stop = _observe(obj, trace, x, grad_tol)
        if stop or (horizon is not None and t >= horizon):
            return trace
        trace.set_last_beta(step)
        x = x - step * g
        t += 1


def run_nagd(obj: Objective, x0, mu: Optional[float] = None, l: Optional[float] = None,
             horizon: Optional[int] = None, grad_tol: Optional[float] = None, snapshot: bool = False):
    """Constant-momentum Nesterov for strongly convex f.

    y_t = x_t + q (x_t - x_{t-1}),  x_{t+1} = y_t - grad f(y_t) / l,
    q = (sqrt(kappa) - 1)/(sqrt(kappa) + 1). Gradients at x_t are evaluated
    for the trace only.
    """
    _check_limits(horizon, grad_tol)
    if mu is None or l is None:
        mu, l = _need_smoothness(obj, "NAGD")
    if not (0 < mu <= l):
        raise InputError(f"need 0 < mu <= l, got mu={mu}, l={l}")
    r = math.sqrt(l / mu)
    q = (r - 1.0) / (r + 1.0)
    x, trace = _start(obj, x0, "nagd", snapshot, {"mu": mu, "l": l, "momentum": q, "horizon": horizon})
    x_prev = x.copy()
    t = 0
    while True:
        g, stop = _observe(obj, trace, x, grad_tol)
        if stop or (horizon is not None and t >= horizon):
            return trace
        y = x + q * (x - x_prev) if q else x
        gy = g if y is x else obj.grad_fn(y)
        x_prev, x = x, y - gy / l
        t += 1


def rmpe_extrapolate(xs, reg: float = 1e-10):
    """Combine x_0..x_k from k+2 points of a sequence.

    Residuals r_i = x_{i+1} - x_i form U; alpha solves
    (U^T U + lam_r I) z = 1, alpha = z / sum(z), with lam_r = reg * ||U^T U||.
    ``reg == 0`` solves the constrained least-squares problem directly, which
    stays well defined when U^T U is singular. Returns (x_plus or None, lam_r).
    """
    pts = np.asarray(xs, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] < 2:
        raise InputError("need at least two points")
    u = np.diff(pts, axis=0).T
    k1 = u.shape[1]
    if reg == 0.0:
        sol = least_squares_min_norm(u[:, :1] - u[:, 1:], u[:, 0]) if k1 > 1 else None
        a = sol.coeffs if sol is not None else np.zeros(0)
        alpha = np.concatenate([[1.0 - a.sum()], a])
        lam_r = 0.0
    else:
        gram = u.T @ u
        lam_r = reg * float(np.linalg.norm(gram, 2))
        try:
            z = np.linalg.solve(gram + lam_r * np.eye(k1), np.ones(k1))
        except np.linalg.LinAlgError:
            return None, lam_r
        s = z.sum()
        if s == 0.0 or not np.isfinite(s):
            return None, lam_r
        alpha = z / s
    x_plus = alpha @ pts[:k1]
    if not np.all(np.isfinite(x_plus)):
        return None, lam_r
    return x_plus, lam_r


def run_rmpe(obj: Objective, x0, k: int = 5, horizon: Optional[int] = None,
             grad_tol: Optional[float] = None, step: Optional[float] = None,
             reg: float = 1e-10, snapshot: bool = False):
    """Restarted regularized minimal polynomial extrapolation over GD.

    Each round takes k+1 gradient steps from the current point and restarts
    from the extrapolated combination. Every recorded iterate costs one
    gradient evaluation.
    """
    _check_limits(horizon, grad_tol)
    if k < 1:
        raise InputError("k must be >= 1")
    if step is None:
        _, l = _need_smoothness(obj, "default RMPE step")
        step = 1.0 / l
    x, trace = _start(obj, x0, f"rmpe{k}", snapshot, {"k": k, "step": step, "reg": reg, "horizon": horizon})
    rounds = []
    t = 0
    while True:
        pts = [x]
        for _ in range(k + 1):
            g, stop = _observe(obj, trace, pts[-1], grad_tol)
            if stop or (horizon is not None and t >= horizon):
                trace.meta["rounds"] = rounds
                return trace
            trace.set_last_beta(step)
            pts.append(pts[-1] - step * g)
            t += 1
        x_plus, lam_r = rmpe_extrapolate(pts, reg)
        fallback = x_plus is None
        rounds.append({"t": t, "reg": lam_r, "fallback": fallback})
        if fallback:
            trace.notes.append(f"round ending at t={t}: degenerate extrapolation, kept last iterate")
            x_plus = pts[-1]
        x = x_plus
