import numpy as np
import pytest

from accel.chebyshev import beta_schedule
from accel.errors import InputError
from accel.problems import QuadraticProblem, logistic_objective, quadratic_generate
from accel.problems import Dataset
from accel.solvers import RunTrace, SolverConfig, run_anderson
from accel.verify import (
    GeneralBoundParams,
    OracleReport,
    check_cheby_bound,
    check_general_bound,
    check_gmres_equivalence,
    check_linear_contraction,
    check_residual_recursion,
    cheby_run,
    estimate_gamma,
    fd_hessian,
)


def test_report_pass_logic():
    rep = OracleReport("x", tolerance=0.1)
    rep.add(0, 1.0, 1.05)
    rep.add(1, 1.0, 0.95)
    assert rep.passed and abs(rep.min_slack + 0.05) < 1e-12
    rep.add(2, 1.0, 0.5)
    assert not rep.passed
    assert rep.to_dict()["passed"] is False


def test_recursion_holds_for_several_windows():
    p = quadratic_generate(20, 1.0, 50.0, seed=4)
    x0 = np.random.default_rng(0).standard_normal(20)
    for m in (0, 1, 3, 5):
        rep = check_residual_recursion(p, x0, m, beta_schedule(1.0, 50.0, 15), 15)
        assert rep.passed, (m, rep.min_slack, rep.tolerance)


def test_gmres_equivalence_passes():
    p = quadratic_generate(10, 1.0, 30.0, seed=5)
    rep = check_gmres_equivalence(p, 10)
    assert rep.passed and rep.records


def test_cheby_bound_and_mismatch():
    p = quadratic_generate(20, 1.0, 100.0, seed=0)
    c = QuadraticProblem(p.a, np.zeros(20), p.mu, p.l)
    tr = cheby_run(c, np.ones(20), 0, 60)
    rep = check_cheby_bound(c, tr)
    assert rep.passed and not rep.informational
    other = QuadraticProblem(p.a, p.b, 2.0, p.l)
    with pytest.raises(InputError):
        check_cheby_bound(other, tr)
    with pytest.raises(InputError):
        check_cheby_bound(c, RunTrace("x"))


def test_contraction_requires_matching_step():
    p = quadratic_generate(15, 1.0, 40.0, seed=2)
    lam = 2.0 / 41.0
    tr = run_anderson(p.objective(), np.ones(15), SolverConfig(m=3, lam=lam, horizon=60))
    assert check_linear_contraction(p, tr).passed
    wrong = run_anderson(p.objective(), np.ones(15), SolverConfig(m=3, lam=0.01, horizon=5))
    with pytest.raises(InputError):
        check_linear_contraction(p, wrong)


def test_fd_hessian_of_quadratic_is_exact():
    p = quadratic_generate(6, 1.0, 10.0, seed=3)
    h = fd_hessian(p.objective(), np.ones(6))
    assert np.allclose(h, p.a, atol=1e-6)
    assert estimate_gamma(p.objective(), [np.zeros(6), np.ones(6), -np.ones(6)]) < 1e-4


def test_general_bound_is_informational():
    x = np.random.default_rng(1).standard_normal((40, 3))
    ds = Dataset(x, (x[:, 0] > 0).astype(float))
    obj = logistic_objective(ds, ridge=0.1)
    cfg = SolverConfig(m=2, lam=2.0 / (obj.known_l + obj.known_mu), horizon=20, snapshot=True)
    tr = run_anderson(obj, np.zeros(3), cfg)
    rep = check_general_bound(tr, GeneralBoundParams(1.0, obj.known_mu, obj.known_l), 2)
    assert rep.informational and len(rep.records) == len(tr) - 1
    with pytest.raises(InputError):
        GeneralBoundParams(float("nan"), 1.0, 2.0)
