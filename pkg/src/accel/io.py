"""Problem files (JSON), trace CSVs and report JSON."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import FormatError
from .problems import QuadraticProblem

TRACE_HEADER = ("iter", "grad_norm", "f_value", "beta_t")
PROBLEM_FORMAT = "accel.quadratic/1"


def _num(v) -> str:
    # repr of a Python float round-trips exactly
    return "" if v is None else repr(float(v))


def problem_to_dict(p: QuadraticProblem) -> dict:
    out = {
        "format": PROBLEM_FORMAT,
        "dimension": p.d,
        "mu": float(p.mu),
        "l": float(p.l),
        "kappa": float(p.l / p.mu),
        "seed": int(p.seed),
        "a": {"rows": p.d, "cols": p.d, "entries": [float(v) for v in p.a.ravel(order="C")]},
        "b": [float(v) for v in p.b],
    }
    if p.eigenvalues is not None:
        out["eigenvalues"] = [float(v) for v in p.eigenvalues]
    return out


def problem_from_dict(data: dict, source="problem") -> QuadraticProblem:
    try:
        if data.get("format") != PROBLEM_FORMAT:
            raise FormatError(f"{source}: unknown format {data.get('format')!r}")
        d = int(data["dimension"])
        a = data["a"]
        if int(a["rows"]) != d or int(a["cols"]) != d:
            raise FormatError(f"{source}: matrix is {a['rows']}x{a['cols']}, dimension is {d}")
        entries = np.asarray(a["entries"], dtype=float)
        b = np.asarray(data["b"], dtype=float)
        if entries.size != d * d or b.shape != (d,):
            raise FormatError(f"{source}: expected {d * d} matrix entries and {d} rhs entries")
        eig = data.get("eigenvalues")
        return QuadraticProblem(
            entries.reshape(d, d), b, float(data["mu"]), float(data["l"]),
            int(data.get("seed", 0)), None if eig is None else np.asarray(eig, dtype=float),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{source}: malformed problem file ({exc})") from None


def save_problem(p: QuadraticProblem, path) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(p), indent=1) + "\n", encoding="utf-8")


def load_problem(path) -> QuadraticProblem:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None
    return problem_from_dict(data, path)


def write_trace_csv(path, grad_norms, f_values, betas, iters=None) -> None:
    """One row per record; ``iters`` overrides the default 0, 1, 2, ... index."""
    iters = range(len(grad_norms)) if iters is None else iters
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for t, g, f, b in zip(iters, grad_norms, f_values, betas):
            w.writerow([int(t), _num(g), _num(f), _num(b)])


def write_run_trace(path, trace) -> None:
    write_trace_csv(path, trace.grad_norms, trace.f_values, trace.betas)


def read_trace_csv(path) -> dict:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != TRACE_HEADER:
        raise FormatError(f"{path}: header must be {','.join(TRACE_HEADER)}")
    out = {k: [] for k in TRACE_HEADER}
    for r in rows[1:]:
        out["iter"].append(int(r[0]))
        for k, cell in zip(TRACE_HEADER[1:], r[1:]):
            out[k].append(float(cell) if cell else None)
    return out


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path, data) -> None:
    Path(path).write_text(json.dumps(_clean(data), indent=2, sort_keys=True) + "\n", encoding="utf-8")
