import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from accel.errors import InputError
from accel.problems import QuadraticProblem, quadratic_generate
from accel.solvers import gmres_solve, rmpe_extrapolate, run_gd, run_nagd, run_rmpe


def test_gd_on_identity_converges_in_one_step():
    p = QuadraticProblem(np.eye(3), np.ones(3), 1.0, 1.0)
    tr = run_gd(p.objective(), np.zeros(3), horizon=5, grad_tol=1e-12, snapshot=True)
    assert np.allclose(tr.iterates[1], 1.0) and tr.status == "converged"


def test_gd_contracts_at_the_optimal_rate():
    p = quadratic_generate(20, 1.0, 9.0, seed=0)
    tr = run_gd(p.objective(), np.zeros(20), horizon=50)
    q = 8.0 / 10.0
    g = tr.grad_norms
    assert all(g[t + 1] <= q * g[t] * (1 + 1e-12) for t in range(len(g) - 1))


def test_nagd_beats_gd_on_ill_conditioned_problem():
    p = quadratic_generate(50, 1.0, 1000.0, seed=1)
    nag = run_nagd(p.objective(), np.zeros(50), horizon=20000, grad_tol=1e-6)
    gd = run_gd(p.objective(), np.zeros(50), horizon=20000, grad_tol=1e-6)
    assert nag.iterations_to(1e-6) < gd.iterations_to(1e-6)


def test_nagd_rejects_bad_parameters():
    p = quadratic_generate(5, 1.0, 10.0, seed=1)
    with pytest.raises(InputError):
        run_nagd(p.objective(), np.zeros(5), mu=2.0, l=1.0, horizon=3)


def test_aitken_on_geometric_sequence():
    x, _ = rmpe_extrapolate([1.0, 0.5, 0.25], reg=0.0)
    assert abs(x[0]) <= 1e-15
    x, _ = rmpe_extrapolate([3.0 + 2.0, 3.0 + 2.0 * 0.3, 3.0 + 2.0 * 0.09], reg=0.0)
    assert math.isclose(x[0], 3.0, rel_tol=1e-12)


@given(seed=st.integers(0, 1000), k=st.integers(1, 4))
def test_extrapolation_is_exact_for_k_modes(seed, k):
    # a sum of k geometric modes is annihilated by a degree-k polynomial
    g = np.random.default_rng(seed)
    rates = g.uniform(0.1, 0.9, size=k)
    coef = g.standard_normal((k, k + 2))
    limit = g.standard_normal(k + 2)
    xs = [limit + sum(c * r ** n for c, r in zip(coef, rates)) for n in range(k + 2)]
    x, _ = rmpe_extrapolate(xs, reg=0.0)
    if np.min(np.abs(np.subtract.outer(rates, rates)) + np.eye(k)) < 0.05:
        return
    assert np.allclose(x, limit, atol=1e-6 * (1 + np.abs(coef).sum()))


def test_rmpe_converges_and_counts_evaluations():
    p = quadratic_generate(30, 1.0, 100.0, seed=2)
    tr = run_rmpe(p.objective(), np.zeros(30), k=5, horizon=5000, grad_tol=1e-8)
    gd = run_gd(p.objective(), np.zeros(30), horizon=5000, grad_tol=1e-8)
    assert tr.status == "converged"
    assert tr.iterations_to(1e-8) < gd.iterations_to(1e-8)
    assert len(tr.meta["rounds"]) >= 1


def test_gmres_small_examples():
    a = np.diag([1.0, 2.0])
    xs = gmres_solve(a, np.ones(2), np.zeros(2), 2)
    assert np.allclose(xs[1], [0.6, 0.6])
    assert np.allclose(xs[2], [1.0, 0.5])
    ident = gmres_solve(np.eye(4), np.arange(4.0), np.zeros(4), 1)
    assert np.allclose(ident[1], np.arange(4.0))


def test_gmres_step_limit():
    with pytest.raises(InputError):
        gmres_solve(np.eye(2), np.ones(2), np.zeros(2), 3)


@given(seed=st.integers(0, 1000), d=st.integers(2, 12))
def test_gmres_residuals_are_monotone_and_optimal(seed, d):
    p = quadratic_generate(d, 1.0, 20.0, seed=seed)
    xs = gmres_solve(p.a, p.b, np.zeros(d), d)
    res = [np.linalg.norm(p.b - p.a @ x) for x in xs]
    assert all(res[t + 1] <= res[t] * (1 + 1e-10) + 1e-13 for t in range(len(res) - 1))
    assert res[-1] <= 1e-8 * res[0]
    # x_1 is the best multiple of b
    c = (p.b @ p.a @ p.b) / np.linalg.norm(p.a @ p.b) ** 2
    assert np.allclose(xs[1], c * p.b, atol=1e-10)
