import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from accel.errors import InputError
from accel.guessing import (
    GuessConfig,
    covering_pair,
    guess_grid,
    kappa_guess,
    next_length,
    run_guessing,
)
from accel.problems import quadratic_generate


def test_kappa_sequence():
    assert [round(kappa_guess(i), 4) for i in (1, 2, 3)] == [20.0855, 54.5982, 148.4132]


def test_length_sequence():
    t, out = 1, []
    for _ in range(4):
        t = next_length(t)
        out.append(t)
    assert out == [2, 5, 13, 35]


def test_config_validation():
    with pytest.raises(InputError):
        GuessConfig(delta=0.0, b_range=10, budget=10)
    with pytest.raises(InputError):
        GuessConfig(delta=1.0, b_range=1.0, budget=10)
    with pytest.raises(InputError):
        GuessConfig(delta=1.0, b_range=10, budget=0)
    with pytest.raises(InputError):
        GuessConfig(delta=1.0, b_range=10, budget=10, inner="other")


@given(delta=st.floats(1e-3, 10.0), log_b=st.floats(0.01, 9.0),
       lo=st.floats(0.0, 1.0), span=st.floats(0.0, 1.0))
def test_grid_covers_every_admissible_spectrum(delta, log_b, lo, span):
    b = math.exp(log_b)
    cfg = GuessConfig(delta=delta, b_range=b, budget=10)
    mu = delta * math.exp(lo * log_b)
    l = mu * math.exp(span * math.log(delta * b / mu)) if mu < delta * b else mu
    l = min(l, delta * b)
    i, j, mu_i, l_i = covering_pair(cfg, mu, l)
    assert mu_i <= mu and l <= l_i
    # the covering guess overshoots the true kappa by at most e^2 (or sits at the smallest guess)
    assert l_i / mu_i <= max(math.e ** 2 * l / mu, kappa_guess(1)) * (1 + 1e-12)


def test_grid_size():
    cfg = GuessConfig(delta=0.5, b_range=40, budget=10)
    assert cfg.j_count == 4 and cfg.i_count == 6
    assert len(guess_grid(cfg)) == 6 * 5


def _problem():
    return quadratic_generate(30, 1.0, 10.0, seed=0)


def test_example_scenario_reaches_tolerance():
    p = _problem()
    tr = run_guessing(p.objective(), np.ones(30), GuessConfig(delta=0.5, b_range=40, budget=5000))
    assert not tr.coverage_violated
    assert tr.evals_to(1e-6) is not None
    assert tr.iterations <= 5000


@given(seed=st.integers(0, 200), budget=st.integers(1, 400))
def test_guard_and_budget(seed, budget):
    p = quadratic_generate(10, 1.0, 30.0, seed=seed)
    x0 = np.random.default_rng(seed).standard_normal(10)
    cfg = GuessConfig(delta=0.2, b_range=500, budget=budget)
    tr = run_guessing(p.objective(), x0, cfg)
    assert tr.iterations <= budget
    g = [tr.grad_norm0] + [r.grad_after for r in tr.records]
    # after each (i, j) pair the kept iterate is never worse than before it
    assert all(g[k + 1] <= g[k] for k in range(len(g) - 1))
    assert np.linalg.norm(p.a @ tr.x_final - p.b) == pytest.approx(tr.final_grad_norm, rel=1e-12)


def test_budget_of_one_runs_nothing():
    p = _problem()
    tr = run_guessing(p.objective(), np.ones(30), GuessConfig(delta=0.5, b_range=40, budget=1))
    assert tr.iterations == 0 and tr.history == []
    assert np.array_equal(tr.x_final, np.ones(30))


def test_coverage_violation_is_reported():
    p = _problem()
    tr = run_guessing(p.objective(), np.ones(30), GuessConfig(delta=2.0, b_range=40, budget=200))
    assert tr.coverage_violated and tr.notes


def test_stationary_start():
    p = _problem()
    tr = run_guessing(p.objective(), p.solution(), GuessConfig(delta=0.5, b_range=40, budget=100, grad_tol=1e-8))
    assert tr.evals_to(1e-6) == 1


def test_x0_shape_checked():
    with pytest.raises(InputError):
        run_guessing(_problem().objective(), np.ones(3), GuessConfig(delta=0.5, b_range=40, budget=10))
