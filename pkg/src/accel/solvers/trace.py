from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

CONVERGED = "converged"
HORIZON = "horizon_reached"
DIVERGED = "diverged"

# abort once ||grad|| exceeds this multiple of its initial value
DIVERGENCE_FACTOR = 1e8


@dataclass
class RunTrace:
    """Per-iteration record of a solver run; index t is the iterate index.

    ``betas[t]`` is the mixing parameter (or step) used to move from x_t to
    x_{t+1}; it is None on the final record and for solvers without one.
    """

    solver: str
    grad_norms: list = field(default_factory=list)
    f_values: list = field(default_factory=list)
    betas: list = field(default_factory=list)
    alphas: list = field(default_factory=list)
    kappa_tilde: list = field(default_factory=list)
    iterates: Optional[list] = None
    status: str = HORIZON
    x_final: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def record(self, x, f_value, grad_norm, beta=None, alpha=None, kappa_tilde=None):
        self.grad_norms.append(float(grad_norm))
        self.f_values.append(float(f_value))
        self.betas.append(None if beta is None else float(beta))
        self.alphas.append(alpha)
        self.kappa_tilde.append(kappa_tilde)
        if self.iterates is not None:
            self.iterates.append(np.array(x, dtype=float, copy=True))
        self.x_final = x

    def set_last_beta(self, beta):
        self.betas[-1] = None if beta is None else float(beta)

    def set_last_alpha(self, alpha, kappa_tilde=None):
        self.alphas[-1] = alpha
        self.kappa_tilde[-1] = kappa_tilde

    def __len__(self) -> int:
        return len(self.grad_norms)

    @property
    def last_t(self) -> int:
        return len(self.grad_norms) - 1

    def grad_array(self) -> np.ndarray:
        return np.asarray(self.grad_norms)

    def iterations_to(self, tol: float) -> Optional[int]:
        """First t with ||grad f(x_t)|| <= tol, or None."""
        for t, g in enumerate(self.grad_norms):
            if g <= tol:
                return t
        return None

    def check_health(self, grad_norm: float) -> bool:
        """Flag divergence; returns True when the run must stop."""
        if not math.isfinite(grad_norm) or grad_norm > DIVERGENCE_FACTOR * self.grad_norms[0]:
            self.status = DIVERGED
            return True
        return False
