"""Objectives and data: quadratics with a prescribed spectrum, logistic loss, CSV ingestion."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .errors import FormatError, InputError


@dataclass(frozen=True)
class Objective:
    """A smooth function together with its gradient.

    ``value_and_grad`` is an optional fused evaluator; solvers fall back to
    calling the two functions separately.
    """

    dim: int
    value_fn: Callable[[np.ndarray], float]
    grad_fn: Callable[[np.ndarray], np.ndarray]
    known_mu: Optional[float] = None
    known_l: Optional[float] = None
    value_and_grad: Optional[Callable[[np.ndarray], tuple]] = None

    def evaluate(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        if self.value_and_grad is not None:
            return self.value_and_grad(x)
        return self.value_fn(x), self.grad_fn(x)


@dataclass(frozen=True, eq=False)
class QuadraticProblem:
    """f(x) = 1/2 x^T A x - b^T x with mu I <= A <= l I."""

    a: np.ndarray
    b: np.ndarray
    mu: float
    l: float
    seed: int = 0
    eigenvalues: Optional[np.ndarray] = None

    @property
    def d(self) -> int:
        return self.b.shape[0]

    @property
    def kappa(self) -> float:
        return self.l / self.mu

    def solution(self) -> np.ndarray:
        return np.linalg.solve(self.a, self.b)

    def objective(self) -> Objective:
        return Objective(
            dim=self.d,
            value_fn=lambda x: quadratic_eval(self, x)[0],
            grad_fn=lambda x: self.a @ x - self.b,
            known_mu=self.mu,
            known_l=self.l,
            value_and_grad=lambda x: quadratic_eval(self, x),
        )


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple = field(default_factory=tuple)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


def _streams(seed: int, count: int):
    # counter-based generators, one independent stream per component
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def _haar_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def quadratic_generate(d: int, mu: float, l: float, seed: int = 0, mode: str = "spectrum") -> QuadraticProblem:
    """Random SPD quadratic.

    ``mode="spectrum"`` (default) builds A = V^T diag(lam) V with Haar V,
    lam containing mu and l exactly and the other d-2 values log-uniform in
    between. ``mode="gram"`` uses A = B^T B for Gaussian B and reports the
    resulting extreme eigenvalues (mu and l are ignored).
    """
    if d < 2:
        raise InputError("d must be >= 2 to pin both spectrum endpoints")
    g_v, g_lam, g_b = _streams(seed, 3)
    if mode == "gram":
        bmat = g_v.standard_normal((d, d))
        a = bmat.T @ bmat
        a = 0.5 * (a + a.T)
        lam = np.linalg.eigvalsh(a)
        b = g_b.standard_normal(d)
        return QuadraticProblem(a, b, float(lam[0]), float(lam[-1]), seed, lam)
    if mode != "spectrum":
        raise InputError(f"unknown mode {mode!r}")
    if not (mu > 0 and l >= mu):
        raise InputError(f"need 0 < mu <= l, got mu={mu}, l={l}")
    v = _haar_orthogonal(g_v, d)
    inner = np.exp(g_lam.uniform(math.log(mu), math.log(l), size=d - 2))
    lam = np.sort(np.concatenate([[mu], inner, [l]]))
    a = (v.T * lam) @ v
    a = 0.5 * (a + a.T)
    b = g_b.standard_normal(d)
    return QuadraticProblem(a, b, float(mu), float(l), int(seed), lam)


def quadratic_eval(p: QuadraticProblem, x) -> tuple[float, np.ndarray]:
    x = np.asarray(x, dtype=float)
    if x.shape != (p.d,):
        raise InputError(f"x has shape {x.shape}, expected ({p.d},)")
    ax = p.a @ x
    return float(0.5 * x @ ax - p.b @ x), ax - p.b


def logistic_eval(ds: Dataset, theta, ridge: float = 0.0) -> tuple[float, np.ndarray]:
    """Negative log-likelihood (summed over samples) plus ridge/2 ||theta||^2."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (ds.d,):
        raise InputError(f"theta has shape {theta.shape}, expected ({ds.d},)")
    if ridge < 0:
        raise InputError("ridge must be >= 0")
    y = ds.labels
    if not np.all((y == 0) | (y == 1)):
        raise InputError("labels must be 0/1")
    z = ds.features @ theta
    # -[y log phi(z) + (1-y) log(1-phi(z))] = log(1+e^z) - y z
    value = float(np.sum(np.logaddexp(0.0, z) - y * z)) + 0.5 * ridge * float(theta @ theta)
    phi = 0.5 * (1.0 + np.tanh(0.5 * z))
    grad = ds.features.T @ (phi - y) + ridge * theta
    return value, grad


def logistic_objective(ds: Dataset, ridge: float = 0.0) -> Objective:
    mu, l = estimate_smoothness(ds, ridge)
    return Objective(
        dim=ds.d,
        value_fn=lambda th: logistic_eval(ds, th, ridge)[0],
        grad_fn=lambda th: logistic_eval(ds, th, ridge)[1],
        known_mu=positive_mu(mu, l),
        known_l=l,
        value_and_grad=lambda th: logistic_eval(ds, th, ridge),
    )


def positive_mu(mu: float, l: float) -> float:
    """Floor used wherever a solver needs mu > 0."""
    return max(mu, 1e-6 * l)


def power_iteration(matvec, dim: int, rel_tol: float = 1e-6, max_iter: int = 100_000, seed: int = 0) -> float:
    """Largest eigenvalue of a symmetric PSD operator."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = matvec(v)
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            return 0.0
        new = float(v @ w)
        v = w / nrm
        if abs(new - est) <= rel_tol * 1e-3 * abs(new):
            return new
        est = new
    return est


def estimate_smoothness(ds: Dataset, ridge: float = 0.0) -> tuple[float, float]:
    """(mu_est, l_est) = (ridge, lambda_max(X^T X)/4 + ridge)."""
    if ds.n == 0:
        raise InputError("empty dataset")
    x = ds.features
    top = power_iteration(lambda v: x.T @ (x @ v), ds.d)
    return float(ridge), 0.25 * top + float(ridge)


def with_intercept(ds: Dataset) -> Dataset:
    feats = np.column_stack([ds.features, np.ones(ds.n)])
    return Dataset(feats, ds.labels, tuple(ds.feature_names) + ("intercept",))


_TRUE = {"true", "yes"}
_FALSE = {"false", "no"}


def _coerce_labels(raw: list[str], path) -> np.ndarray:
    vals = []
    for row, cell in enumerate(raw, start=2):
        c = cell.strip().lower()
        if c in _TRUE:
            vals.append(1.0)
        elif c in _FALSE:
            vals.append(0.0)
        else:
            try:
                vals.append(float(c))
            except ValueError:
                raise FormatError(f"{path}: row {row}: label {cell!r} is not coercible to 0/1") from None
            if not math.isfinite(vals[-1]):
                raise FormatError(f"{path}: row {row}: non-finite label {cell!r}")
    y = np.asarray(vals)
    distinct = np.unique(y)
    if np.all(np.isin(distinct, (0.0, 1.0))):
        return y
    if distinct.size == 2:
        # e.g. {-1, 1} or {2, 4}: smaller value is the negative class
        return (y == distinct[1]).astype(float)
    raise FormatError(f"{path}: label column has {distinct.size} distinct values, expected 2")


def load_dataset_csv(path, label_column: str = "y", standardize: bool = True) -> Dataset:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise FormatError(f"{path}: missing header row")
        header = [h.strip() for h in header]
        if label_column not in header:
            raise FormatError(f"{path}: no column named {label_column!r} in header {header}")
        li = header.index(label_column)
        names = [h for i, h in enumerate(header) if i != li]
        rows, labels = [], []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise FormatError(f"{path}: row {lineno} has {len(rec)} cells, expected {len(header)}")
            feats = []
            for i, cell in enumerate(rec):
                if i == li:
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    raise FormatError(f"{path}: row {lineno}, column {header[i]!r}: non-numeric cell {cell!r}") from None
                if not math.isfinite(v):
                    raise FormatError(f"{path}: row {lineno}, column {header[i]!r}: non-finite cell {cell!r}")
                feats.append(v)
            rows.append(feats)
            labels.append(rec[li])
    if not rows:
        raise FormatError(f"{path}: no data rows")
    x = np.asarray(rows, dtype=float).reshape(len(rows), len(names))
    y = _coerce_labels(labels, path)
    if standardize:
        x = standardize_columns(x)
    return Dataset(x, y, tuple(names))


def standardize_columns(x: np.ndarray) -> np.ndarray:
    """Zero mean, unit population variance; constant columns become 0."""
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    out = x - mean
    nz = std > 0
    out[:, nz] /= std[nz]
    out[:, ~nz] = 0.0
    return out


def bundled_dataset_path() -> Path:
    return Path(__file__).parent / "data" / "synthetic_binary.csv"
