"""Chebyshev polynomials of the first kind and the mixing-parameter schedule."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError


def cheb_eval(degree: int, x):
    """P_degree(x) by the three-term recurrence; ``x`` may be an array."""
    if degree < 0:
        raise InputError("degree must be >= 0")
    x = np.asarray(x, dtype=float)
    prev, cur = np.ones_like(x), x.copy()
    if degree == 0:
        return prev if prev.ndim else float(prev)
    for _ in range(degree - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur if cur.ndim else float(cur)


def cheb_roots(degree: int) -> np.ndarray:
    """Roots cos((2i-1)pi/(2k)), i = 1..k, in descending order."""
    if degree < 1:
        raise InputError("P_0 has no roots")
    i = np.arange(1, degree + 1)
    return np.cos((2 * i - 1) * np.pi / (2 * degree))


@dataclass(frozen=True)
class BetaSchedule:
    """Mixing parameters whose step polynomial prod(1 - beta_t s) is a scaled
    Chebyshev polynomial on [mu, l]."""

    mu: float
    l: float
    horizon: int
    betas: tuple
    order: str = "stable"

    def beta(self, t: int) -> float:
        """beta_t for t = 1, 2, ...; cycles once t passes the horizon."""
        if t < 1:
            raise InputError("schedule index starts at 1")
        return self.betas[(t - 1) % self.horizon]

    def step_polynomial(self, s):
        """H_T(s) = prod_t (1 - beta_t s)."""
        s = np.asarray(s, dtype=float)
        out = np.ones_like(s)
        for b in self.betas:
            out = out * (1.0 - b * s)
        return out

    def scaled_chebyshev(self, s):
        """P_T((2s - (l+mu))/(l-mu)) / P_T(-(l+mu)/(l-mu)); requires mu < l."""
        if self.l == self.mu:
            raise InputError("scaled form undefined for a degenerate spectrum")
        span = self.l - self.mu
        s = np.asarray(s, dtype=float)
        return cheb_eval(self.horizon, (2.0 * s - (self.l + self.mu)) / span) / cheb_eval(
            self.horizon, -(self.l + self.mu) / span
        )


def stable_order(n: int) -> list:
    """Permutation of root indices 1..n that keeps partial products bounded.

    Each root i is paired with its mirror n + 1 - i, so a large step is
    immediately followed by a small one; the pairs are ordered recursively
    the same way. For odd n the middle root (beta = 2/(l + mu)) goes last.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    if n == 1:
        return [1]
    if n % 2 == 0:
        out = []
        for j in stable_order(n // 2):
            out += [j, n + 1 - j]
        return out
    mid = (n + 1) // 2
    return [k if k < mid else k + 1 for k in stable_order(n - 1)] + [mid]


def beta_schedule(mu: float, l: float, horizon: int, order: str = "stable") -> BetaSchedule:
    """beta_i = 1/((l+mu)/2 + (l-mu)/2 cos((2i-1)pi/(2T))), i = 1..T.

    ``order="natural"`` applies them as i = 1..T. The product of the factors
    is the same in either order, but in floating point the natural order lets
    intermediate iterates grow by many orders of magnitude before the final
    factors cancel the growth, so the default interleaves them.
    """
    if not (mu > 0 and l >= mu):
        raise InputError(f"need 0 < mu <= l, got mu={mu}, l={l}")
    if horizon < 1:
        raise InputError("horizon must be >= 1")
    if order not in ("stable", "natural"):
        raise InputError(f"unknown order {order!r}")
    t = np.arange(1, horizon + 1)
    betas = 1.0 / ((l + mu) / 2.0 + (l - mu) / 2.0 * np.cos((2 * t - 1) * np.pi / (2 * horizon)))
    if order == "stable":
        betas = betas[np.asarray(stable_order(horizon)) - 1]
    return BetaSchedule(float(mu), float(l), int(horizon), tuple(float(b) for b in betas), order)


def damping_factor(mu: float, l: float, horizon: int) -> float:
    """1/|P_T(-(l+mu)/(l-mu))|, the worst-case |H_T| over [mu, l]."""
    if l == mu:
        return 0.0
    return 1.0 / abs(cheb_eval(horizon, -(l + mu) / (l - mu)))


def contraction_ratio(kappa: float) -> float:
    """(sqrt(kappa) - 1)/(sqrt(kappa) + 1)."""
    r = math.sqrt(kappa)
    return (r - 1.0) / (r + 1.0)


def rate_bound(kappa: float, t: float) -> float:
    """2 * ratio(kappa)^t."""
    return 2.0 * contraction_ratio(kappa) ** t


def horizon_for_tolerance(kappa: float, reduction: float) -> int:
    """Smallest T with 2 ratio^T <= reduction (the m = 0 Chebyshev guarantee)."""
    rho = contraction_ratio(kappa)
    if rho == 0.0 or reduction >= 2.0:
        return 1
    return max(1, math.ceil(math.log(reduction / 2.0) / math.log(rho)))
