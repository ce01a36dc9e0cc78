"""Dense QR kernels used by the Anderson window and the oracles.

Everything here works on small dense numpy arrays. ``q`` factors are kept
square (rows x rows) so that appending a column is a single Householder
reflection on the trailing block; ``r`` is rows x cols upper trapezoidal with
a non-negative diagonal.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InputError, StateError

EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class QRFactors:
    q: np.ndarray
    r: np.ndarray
    tol: float

    @cached_property
    def rank(self) -> int:
        # computed on demand; the sliding window updates far more often than it asks
        return _rank_of(self.r, self.tol) if self.r.shape[1] else 0

    @property
    def rows(self) -> int:
        return self.r.shape[0]

    @property
    def cols(self) -> int:
        return self.r.shape[1]

    def product(self) -> np.ndarray:
        return self.q @ self.r


@dataclass(frozen=True)
class LstSqSolution:
    coeffs: np.ndarray
    residual_norm: float
    rank: int


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2 or a.shape[0] < 1:
        raise InputError(f"expected a 2-D matrix with at least one row, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix has non-finite entries")
    return a


def _as_vector(v, n: int, what: str = "vector") -> np.ndarray:
    x = np.asarray(v, dtype=float).reshape(-1)
    if x.shape[0] != n:
        raise InputError(f"{what} has length {x.shape[0]}, expected {n}")
    return x


def default_tol(m: np.ndarray) -> float:
    """max(rows, cols) * eps * largest column norm."""
    rows, cols = m.shape
    if cols == 0:
        return 0.0
    return max(rows, cols) * EPS * float(np.max(np.linalg.norm(m, axis=0)))


def _reflector(x: np.ndarray):
    """Unit Householder vector v with (I - 2vv^T) x = -sign(x0) |x| e1."""
    alpha = float(np.linalg.norm(x))
    if alpha == 0.0 or x.shape[0] == 1:
        return None, alpha
    v = x.copy()
    v[0] += np.copysign(alpha, x[0])
    v /= np.linalg.norm(v)
    return v, alpha


def _householder(m: np.ndarray, pivot: bool = False):
    """Householder QR, optionally with column pivoting.

    Returns (q, r, perm) with m[:, perm] = q @ r and diag(r) >= 0.
    """
    r = np.array(m, dtype=float, copy=True)
    rows, cols = r.shape
    q = np.eye(rows)
    perm = np.arange(cols)
    for j in range(min(rows, cols)):
        if pivot:
            trailing = np.einsum("ij,ij->j", r[j:, j:], r[j:, j:])
            p = j + int(np.argmax(trailing))
            if p != j:
                r[:, [j, p]] = r[:, [p, j]]
                perm[[j, p]] = perm[[p, j]]
        v, _ = _reflector(r[j:, j])
        if v is not None:
            r[j:, j:] -= 2.0 * np.outer(v, v @ r[j:, j:])
            q[:, j:] -= 2.0 * np.outer(q[:, j:] @ v, v)
            r[j + 1:, j] = 0.0
        if r[j, j] < 0.0:
            r[j, j:] *= -1.0
            q[:, j] *= -1.0
    return q, r, perm


def _back_substitute(u: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = u.shape[0]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - u[i, i + 1:] @ x[i + 1:]) / u[i, i]
    return x


def _forward_substitute(lo: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = lo.shape[0]
    x = np.zeros(n)
    for i in range(n):
        x[i] = (y[i] - lo[i, :i] @ x[:i]) / lo[i, i]
    return x


def _rank_revealing(s: np.ndarray, tol: float):
    q2, r2, perm = _householder(s, pivot=True)
    k = min(s.shape)
    diag = np.abs(np.diag(r2)[:k])
    rank = int(np.count_nonzero(diag > tol))
    return q2, r2, perm, rank


def small_min_norm(s: np.ndarray, c: np.ndarray, tol: float):
    """Minimal-norm minimizer of ||c - s z|| by complete orthogonal decomposition.

    Intended for the small k x n triangular-ish blocks left after an outer QR.
    Returns (z, rank, smallest retained pivot magnitude or inf).
    """
    n = s.shape[1]
    if n == 0 or s.shape[0] == 0:
        return np.zeros(n), 0, np.inf
    q2, r2, perm, rank = _rank_revealing(s, tol)
    if rank == 0:
        return np.zeros(n), 0, np.inf
    y = (q2.T @ c)[:rank]
    top = r2[:rank, :]
    if rank == n:
        z = _back_substitute(top[:, :n], y)
    else:
        # top = T^T Z^T with Z orthonormal (n x rank): minimal-norm z = Z T^{-T} y
        zq, t, _ = _householder(top.T)
        w = _forward_substitute(t[:rank, :rank].T, y)
        z = zq[:, :rank] @ w
    out = np.empty(n)
    out[perm] = z
    return out, rank, float(abs(r2[rank - 1, rank - 1]))


def qr_factor(m, tol: float = 0.0) -> QRFactors:
    """Householder QR of ``m`` with a rank estimate at threshold ``tol``.

    ``tol == 0`` selects :func:`default_tol`. The rank is the number of pivots
    above ``tol`` in a column-pivoted refactorization of the small ``r`` block,
    which coincides with counting ``|diag(r)| > tol`` whenever the unpivoted
    diagonal is already rank revealing.
    """
    if tol < 0:
        raise InputError("tol must be non-negative")
    a = _as_matrix(m)
    tol = tol or default_tol(a)
    q, r, _ = _householder(a)
    return QRFactors(q=q, r=r, tol=tol)


def _rank_of(r: np.ndarray, tol: float) -> int:
    k = min(r.shape)
    if k == 0:
        return 0
    return _rank_revealing(r[:k], tol)[3]


def empty_qr(rows: int) -> QRFactors:
    """Factorization of a rows x 0 matrix."""
    if rows < 1:
        raise InputError("rows must be >= 1")
    return QRFactors(q=np.eye(rows), r=np.zeros((rows, 0)), tol=0.0)


def least_squares_min_norm(m, rhs, tol: float = 0.0) -> LstSqSolution:
    """Pseudoinverse solution of min ||rhs - m c||."""
    a = _as_matrix(m)
    b = _as_vector(rhs, a.shape[0], "rhs")
    rows, cols = a.shape
    if cols == 0:
        return LstSqSolution(np.zeros(0), float(np.linalg.norm(b)), 0)
    f = qr_factor(a, tol)
    k = min(rows, cols)
    coeffs, rank, _ = small_min_norm(f.r[:k], (f.q.T @ b)[:k], f.tol)
    return LstSqSolution(coeffs, float(np.linalg.norm(b - a @ coeffs)), rank)


def complement_basis(m, tol: float = 0.0) -> np.ndarray:
    """Orthonormal basis (rows x rank) of col(m) at rank threshold ``tol``."""
    a = _as_matrix(m)
    rows, cols = a.shape
    if cols == 0:
        return np.zeros((rows, 0))
    f = qr_factor(a, tol)
    k = min(rows, cols)
    q2, _, _, rank = _rank_revealing(f.r[:k], f.tol)
    return f.q[:, :k] @ q2[:, :rank]


def project_complement(m, v, tol: float = 0.0) -> np.ndarray:
    """Return (I - U U^T) v, U an orthonormal basis of col(m)."""
    a = _as_matrix(m)
    x = _as_vector(v, a.shape[0])
    u = complement_basis(a, tol)
    return x - u @ (u.T @ x)


def _append_column(q: np.ndarray, r: np.ndarray, a: np.ndarray):
    rows, n = r.shape
    z = q.T @ a
    if n < rows:
        v, alpha = _reflector(z[n:])
        if v is not None:
            q[:, n:] -= 2.0 * np.outer(q[:, n:] @ v, v)
            z[n] = -np.copysign(alpha, z[n])
            z[n + 1:] = 0.0
        if z[n] < 0.0:
            z[n] = -z[n]
            q[:, n] *= -1.0
    return q, np.column_stack([r, z])


def _drop_first_column(q: np.ndarray, r: np.ndarray):
    r = r[:, 1:].copy()
    rows, n = r.shape
    # r is upper Hessenberg now; Givens sweep restores the triangle
    for j in range(min(n, rows - 1)):
        a, b = r[j, j], r[j + 1, j]
        if b != 0.0:
            rho = float(np.hypot(a, b))
            c, s = a / rho, b / rho
            g = np.array([[c, s], [-s, c]])
            r[[j, j + 1], j:] = g @ r[[j, j + 1], j:]
            q[:, [j, j + 1]] = q[:, [j, j + 1]] @ g.T
            r[j + 1, j] = 0.0
        if r[j, j] < 0.0:
            r[j, j:] *= -1.0
            q[:, j] *= -1.0
    if n >= rows and r[rows - 1, rows - 1] < 0.0:
        r[rows - 1, rows - 1:] *= -1.0
        q[:, rows - 1] *= -1.0
    return q, r


def qr_update(f: QRFactors, append=None, drop_oldest: bool = False, tol: float = 0.0) -> QRFactors:
    """Slide a factorization: drop the first column and/or append one at the end."""
    if append is None and not drop_oldest:
        raise InputError("qr_update needs append and/or drop_oldest")
    q, r = f.q.copy(), f.r.copy()
    if drop_oldest:
        if r.shape[1] == 0:
            raise StateError("cannot drop a column from an empty factorization")
        q, r = _drop_first_column(q, r)
    if append is not None:
        a = _as_vector(append, f.rows, "appended column")
        if not np.all(np.isfinite(a)):
            raise InputError("appended column has non-finite entries")
        q, r = _append_column(q, r, a)
    if r.shape[1] == 0:
        return QRFactors(q=q, r=r, tol=0.0)
    tol = tol or default_tol(r)
    return QRFactors(q=q, r=r, tol=tol)
