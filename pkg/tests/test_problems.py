import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from accel.errors import FormatError, InputError
from accel.problems import (
    Dataset,
    QuadraticProblem,
    bundled_dataset_path,
    estimate_smoothness,
    load_dataset_csv,
    logistic_eval,
    logistic_objective,
    power_iteration,
    quadratic_eval,
    quadratic_generate,
    standardize_columns,
    with_intercept,
)


def test_small_spectrum_is_exact():
    p = quadratic_generate(2, 1.0, 4.0, seed=0)
    assert np.array_equal(p.eigenvalues, [1.0, 4.0])
    assert np.allclose(np.linalg.eigvalsh(p.a), [1.0, 4.0], atol=1e-12)
    assert p.kappa == 4.0


def test_condition_number_by_power_iteration():
    p = quadratic_generate(100, 1.0, 500.0, seed=7)
    top = power_iteration(lambda v: p.a @ v, 100, rel_tol=1e-10)
    # smallest eigenvalue: power iteration on the shifted operator l I - A
    low = 500.0 - power_iteration(lambda v: 500.0 * v - p.a @ v, 100, rel_tol=1e-12)
    assert abs(top / low - 500.0) <= 1e-6 * 500.0
    assert np.linalg.norm(p.a - p.a.T) <= 1e-12


def test_same_seed_same_problem():
    a = quadratic_generate(30, 1.0, 50.0, seed=3)
    b = quadratic_generate(30, 1.0, 50.0, seed=3)
    assert a.a.tobytes() == b.a.tobytes() and a.b.tobytes() == b.b.tobytes()
    c = quadratic_generate(30, 1.0, 50.0, seed=4)
    assert not np.array_equal(a.b, c.b)


def test_generator_rejects_bad_input():
    with pytest.raises(InputError):
        quadratic_generate(1, 1.0, 2.0)
    with pytest.raises(InputError):
        quadratic_generate(5, 0.0, 2.0)
    with pytest.raises(InputError):
        quadratic_generate(5, 1.0, 2.0, mode="other")


def test_gram_mode_reports_its_spectrum():
    p = quadratic_generate(10, 1.0, 1.0, seed=1, mode="gram")
    ev = np.linalg.eigvalsh(p.a)
    assert math.isclose(p.mu, ev[0], rel_tol=1e-9) and math.isclose(p.l, ev[-1], rel_tol=1e-9)


@given(d=st.integers(2, 30), kappa=st.floats(1.0, 1e4), seed=st.integers(0, 1000))
def test_spectrum_endpoints(d, kappa, seed):
    p = quadratic_generate(d, 1.0, kappa, seed=seed)
    ev = np.linalg.eigvalsh(p.a)
    assert abs(ev[0] - 1.0) <= 1e-8 * kappa and abs(ev[-1] - kappa) <= 1e-8 * kappa


def test_quadratic_eval():
    p = QuadraticProblem(np.eye(2), np.zeros(2), 1.0, 1.0)
    f, g = quadratic_eval(p, [3.0, 4.0])
    assert f == 12.5 and np.array_equal(g, [3.0, 4.0])
    q = quadratic_generate(6, 1.0, 10.0, seed=2)
    assert np.linalg.norm(quadratic_eval(q, q.solution())[1]) <= 1e-12
    with pytest.raises(InputError):
        quadratic_eval(q, np.zeros(5))


def _fd_grad(fun, x, h=1e-6):
    out = np.zeros_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        out[k] = (fun(x + e) - fun(x - e)) / (2 * h)
    return out


def test_quadratic_gradient_matches_finite_differences(rng):
    p = quadratic_generate(8, 1.0, 20.0, seed=5)
    x = rng.standard_normal(8)
    fd = _fd_grad(lambda z: quadratic_eval(p, z)[0], x)
    assert np.allclose(fd, quadratic_eval(p, x)[1], rtol=1e-6, atol=1e-6)


def test_logistic_at_zero():
    ds = Dataset(np.arange(12, dtype=float).reshape(6, 2), np.array([0, 1, 0, 1, 1, 0.0]))
    f, _ = logistic_eval(ds, np.zeros(2))
    assert math.isclose(f, 6 * math.log(2))
    one = Dataset(np.array([[1.0, 0.0]]), np.array([1.0]))
    assert np.allclose(logistic_eval(one, np.zeros(2))[1], [-0.5, 0.0])


def test_logistic_rejects_bad_labels():
    ds = Dataset(np.ones((2, 1)), np.array([0.0, 2.0]))
    with pytest.raises(InputError):
        logistic_eval(ds, np.zeros(1))


def test_logistic_is_stable_for_large_margins():
    ds = Dataset(np.array([[1.0], [-1.0]]), np.array([1.0, 1.0]))
    f, g = logistic_eval(ds, np.array([700.0]))
    assert math.isfinite(f) and np.all(np.isfinite(g))
    assert math.isclose(f, 700.0, rel_tol=1e-12)


def test_logistic_gradient_matches_finite_differences(rng):
    ds = with_intercept(load_dataset_csv(bundled_dataset_path()))
    theta = 0.3 * rng.standard_normal(ds.d)
    fd = _fd_grad(lambda th: logistic_eval(ds, th, 0.1)[0], theta, h=1e-5)
    g = logistic_eval(ds, theta, 0.1)[1]
    assert np.linalg.norm(fd - g) <= 1e-5 * np.linalg.norm(g)


def test_smoothness_estimates():
    ds = Dataset(np.eye(2), np.array([0.0, 1.0]))
    mu, l = estimate_smoothness(ds)
    assert mu == 0.0 and math.isclose(l, 0.25, rel_tol=1e-6)
    mu, l = estimate_smoothness(ds, ridge=0.1)
    assert mu == 0.1 and math.isclose(l, 0.35, rel_tol=1e-6)
    big = Dataset(2 * np.eye(2), ds.labels)
    assert math.isclose(estimate_smoothness(big)[1], 1.0, rel_tol=1e-6)


def test_logistic_objective_uses_positive_mu():
    ds = Dataset(np.eye(2), np.array([0.0, 1.0]))
    obj = logistic_objective(ds)
    assert obj.known_mu > 0 and math.isclose(obj.known_mu, 1e-6 * obj.known_l)


def test_csv_small_file(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a,b,y\n1,2,0\n2,3,1\n3,5,1\n")
    ds = load_dataset_csv(path, standardize=False)
    assert ds.n == 3 and ds.d == 2 and ds.feature_names == ("a", "b")
    assert np.array_equal(ds.labels, [0.0, 1.0, 1.0])


def test_csv_standardizes_columns(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a,b,y\n1,7,0\n2,7,1\n3,7,1\n")
    ds = load_dataset_csv(path)
    assert np.allclose(ds.features[:, 0], [-1.2247449, 0.0, 1.2247449], atol=1e-6)
    assert np.array_equal(ds.features[:, 1], [0.0, 0.0, 0.0])


def test_csv_label_coercion(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a,y\n1,yes\n2,no\n3,true\n")
    assert np.array_equal(load_dataset_csv(path).labels, [1.0, 0.0, 1.0])
    path.write_text("a,y\n1,-1\n2,1\n")
    assert np.array_equal(load_dataset_csv(path).labels, [0.0, 1.0])


@pytest.mark.parametrize("body, fragment", [
    ("a,b\n1,2\n", "no column named 'y'"),
    ("", "missing header"),
    ("a,y\n1,0\nNaN,1\n", "row 3, column 'a'"),
    ("a,y\n1,0\nx,1\n", "non-numeric cell 'x'"),
    ("a,y\n1,0\n2,maybe\n", "not coercible"),
    ("a,y\n1,0\n2,1\n3,2\n", "distinct values"),
])
def test_csv_errors(tmp_path, body, fragment):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(FormatError, match=fragment):
        load_dataset_csv(path)


def test_standardize_columns():
    out = standardize_columns(np.array([[1.0], [2.0], [3.0]]))
    assert np.allclose(out.ravel(), [-math.sqrt(1.5), 0.0, math.sqrt(1.5)])


def test_bundled_dataset_shape():
    ds = load_dataset_csv(bundled_dataset_path())
    assert ds.n <= 1000 and ds.d <= 20
    assert 0.2 < ds.labels.mean() < 0.8
