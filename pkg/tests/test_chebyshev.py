import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from accel.chebyshev import (
    beta_schedule,
    cheb_eval,
    cheb_roots,
    contraction_ratio,
    damping_factor,
    horizon_for_tolerance,
    stable_order,
)
from accel.errors import InputError


def test_low_degree_values():
    assert cheb_eval(0, 0.3) == 1.0
    assert math.isclose(cheb_eval(2, 0.5), -0.5)
    assert abs(cheb_eval(4, math.cos(math.pi / 8))) < 1e-12


def test_matches_trigonometric_form():
    x = np.linspace(-1, 1, 101)
    for k in (1, 5, 17, 64):
        assert np.allclose(cheb_eval(k, x), np.cos(k * np.arccos(x)), atol=1e-11)


def test_roots():
    assert np.allclose(cheb_roots(1), [0.0])
    assert np.allclose(cheb_roots(2), [math.sqrt(2) / 2, -math.sqrt(2) / 2])
    assert math.isclose(cheb_roots(4)[0], math.cos(math.pi / 8))
    assert round(cheb_roots(4)[0], 2) == 0.92
    with pytest.raises(InputError):
        cheb_roots(0)


@given(k=st.integers(1, 64))
def test_roots_are_zeros_and_descending(k):
    r = cheb_roots(k)
    assert np.all(np.diff(r) < 0)
    assert np.max(np.abs(cheb_eval(k, r))) <= 1e-12


def test_schedule_examples():
    s = beta_schedule(1, 3, 2, order="natural")
    assert math.isclose(s.betas[0], 1 / (2 + math.cos(math.pi / 4)), rel_tol=1e-15)
    assert math.isclose(s.betas[0], 0.369398, abs_tol=1e-6)
    assert math.isclose(s.betas[1], 0.773459, abs_tol=1e-6)
    assert beta_schedule(1, 3, 2).betas == s.betas
    assert beta_schedule(1, 3, 1).betas == (0.5,)
    assert all(b == 0.5 for b in beta_schedule(2, 2, 7).betas)


def test_schedule_rejects_bad_spectrum():
    with pytest.raises(InputError):
        beta_schedule(0, 1, 3)
    with pytest.raises(InputError):
        beta_schedule(2, 1, 3)
    with pytest.raises(InputError):
        beta_schedule(1, 2, 0)


def test_schedule_cycles_past_horizon():
    s = beta_schedule(1, 10, 3)
    assert [s.beta(t) for t in range(1, 7)] == list(s.betas) * 2


@given(n=st.integers(1, 300))
def test_stable_order_is_a_permutation(n):
    assert sorted(stable_order(n)) == list(range(1, n + 1))


@given(mu=st.floats(0.1, 10), ratio=st.floats(1.01, 1000), horizon=st.integers(1, 40))
def test_step_polynomial_is_scaled_chebyshev(mu, ratio, horizon):
    s = beta_schedule(mu, mu * ratio, horizon)
    lam = np.linspace(mu, mu * ratio, 50)
    assert np.allclose(s.step_polynomial(lam), s.scaled_chebyshev(lam), atol=1e-9)


def test_order_does_not_change_the_product():
    lam = np.linspace(1, 100, 77)
    a = beta_schedule(1, 100, 32).step_polynomial(lam)
    b = beta_schedule(1, 100, 32, order="natural").step_polynomial(lam)
    assert np.allclose(a, b, atol=1e-12)


def test_contraction_ratio_and_horizon():
    assert contraction_ratio(1.0) == 0.0
    assert math.isclose(contraction_ratio(9.0), 0.5)
    t = horizon_for_tolerance(100.0, 1e-6)
    assert 2 * contraction_ratio(100.0) ** t <= 1e-6 < 2 * contraction_ratio(100.0) ** (t - 1)


def test_damping_factor_within_rate_bound():
    for mu, l in [(1, 3), (1, 100), (0.5, 4000)]:
        for t in (1, 8, 32, 200):
            rho = (math.sqrt(l) - math.sqrt(mu)) / (math.sqrt(l) + math.sqrt(mu))
            assert damping_factor(mu, l, t) <= 2 * rho ** t * (1 + 1e-12)
    assert damping_factor(2, 2, 5) == 0.0
