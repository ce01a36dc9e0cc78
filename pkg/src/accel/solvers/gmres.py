"""Plain GMRES (Arnoldi with modified Gram-Schmidt), no restarts."""
from __future__ import annotations

import numpy as np

from ..errors import InputError
from ..linalg import least_squares_min_norm


def gmres_solve(a, b, x0, steps: int) -> list:
    """Iterates x_0..x_k minimizing ||b - A x|| over x_0 + K_k(A, r_0).

    Returns fewer than steps + 1 iterates when the Krylov space becomes
    invariant; the last one then solves the system.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    d = b.shape[0]
    if a.shape != (d, d) or x0.shape != (d,):
        raise InputError(f"shape mismatch: A {a.shape}, b {b.shape}, x0 {x0.shape}")
    if steps < 0 or steps > d:
        raise InputError(f"steps must be in [0, {d}]")
    r0 = b - a @ x0
    beta = float(np.linalg.norm(r0))
    xs = [x0.copy()]
    if beta == 0.0:
        return xs
    scale = float(np.linalg.norm(a, 2))
    basis = np.zeros((d, steps + 1))
    h = np.zeros((steps + 1, steps))
    basis[:, 0] = r0 / beta
    for j in range(steps):
        w = a @ basis[:, j]
        for _ in range(2):  # second pass restores orthogonality lost to cancellation
            for i in range(j + 1):
                c = basis[:, i] @ w
                h[i, j] += c
                w = w - c * basis[:, i]
        h[j + 1, j] = np.linalg.norm(w)
        rhs = np.zeros(j + 2)
        rhs[0] = beta
        breakdown = h[j + 1, j] <= 1e-14 * scale or j + 1 == d
        if breakdown:
            y = least_squares_min_norm(h[: j + 1, : j + 1], rhs[: j + 1]).coeffs
        else:
            y = least_squares_min_norm(h[: j + 2, : j + 1], rhs).coeffs
            basis[:, j + 1] = w / h[j + 1, j]
        xs.append(x0 + basis[:, : j + 1] @ y)
        if breakdown:
            break
    return xs
