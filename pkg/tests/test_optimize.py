import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qfraud.optimize import OptimizerConfig, minimize, write_trajectory_csv

METHODS = ["cobyla", "nelder-mead"]


def sphere(x):
    return float(np.sum(x**2))


def rosenbrock(x):
    return float(100 * (x[1] - x[0] ** 2) ** 2 + (1 - x[0]) ** 2)


def coordinate_descent(f, x0, step=0.5, tol=1e-6):
    """Compass search: tries +-step on each axis, halves step when stuck."""
    x = np.array(x0, dtype=float)
    fx = f(x)
    while step > tol:
        improved = False
        for i in range(x.size):
            for s in (step, -step):
                y = x.copy()
                y[i] += s
                fy = f(y)
                if fy < fx:
                    x, fx, improved = y, fy, True
        if not improved:
            step /= 2
    return x, fx


def test_sphere_cobyla_within_budget():
    res = minimize(sphere, np.ones(4), OptimizerConfig(maxiter=200))
    assert res.best_f <= 1e-6
    assert res.evaluations <= 200
    _, f_oracle = coordinate_descent(sphere, np.ones(4))
    assert res.best_f <= f_oracle + 1e-6


@pytest.mark.parametrize("method", METHODS)
def test_rosenbrock_progress(method):
    res = minimize(rosenbrock, [-1.2, 1.0], OptimizerConfig(method=method, maxiter=500))
    assert res.best_f < rosenbrock(np.array([-1.2, 1.0])) / 100


def test_nelder_mead_rosenbrock():
    res = minimize(rosenbrock, [-1.2, 1.0], OptimizerConfig(method="nelder-mead", maxiter=500, rho_end=1e-8))
    assert res.best_f <= 1e-6
    np.testing.assert_allclose(res.best_x, [1, 1], atol=1e-3)


@pytest.mark.parametrize("method", METHODS)
def test_budget_of_one_returns_x0(method):
    calls = []
    res = minimize(lambda x: calls.append(x) or sphere(x), [0.3, -0.2], OptimizerConfig(method=method, maxiter=1))
    assert res.evaluations == 1 and len(calls) == 1
    np.testing.assert_array_equal(res.best_x, [0.3, -0.2])


def test_non_finite_start_is_an_error():
    with pytest.raises(ValueError):
        minimize(lambda x: math.nan, [0.0])
    with pytest.raises(ValueError):
        minimize(sphere, [])


@pytest.mark.parametrize("method", METHODS)
def test_non_finite_values_are_rejected_mid_run(method):
    def f(x):
        return math.inf if x[0] > 0.2 else sphere(x - 0.1)

    res = minimize(f, [0.0, 0.0], OptimizerConfig(method=method, maxiter=150))
    assert math.isfinite(res.best_f)
    assert res.best_x[0] <= 0.2


def test_config_validation():
    for kw in (dict(method="bfgs"), dict(maxiter=0), dict(rho_begin=0.1, rho_end=0.2), dict(rho_end=0.0)):
        with pytest.raises(ValueError):
            OptimizerConfig(**kw)


quadratic = st.tuples(st.integers(1, 5), st.integers(0, 2**32 - 1))


def _problem(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    H = A @ A.T + n * np.eye(n)
    c = rng.normal(size=n)
    return (lambda x: float((x - c) @ H @ (x - c))), rng.normal(size=n)


@given(quadratic, st.sampled_from(METHODS))
def test_result_contract(problem, method):
    f, x0 = _problem(*problem)
    cfg = OptimizerConfig(method=method, maxiter=80)
    res = minimize(f, x0, cfg)
    fs = [v for _, v in res.trajectory]
    assert res.evaluations == len(fs) <= 80
    assert res.best_f == min(fs)
    assert [i for i, _ in res.trajectory] == list(range(len(fs)))
    assert f(res.best_x) == pytest.approx(res.best_f, abs=1e-12, rel=1e-12)


@given(quadratic, st.sampled_from(METHODS), st.integers(1, 60), st.integers(1, 60))
def test_best_is_monotone_in_budget(problem, method, m1, extra):
    f, x0 = _problem(*problem)
    a = minimize(f, x0, OptimizerConfig(method=method, maxiter=m1))
    b = minimize(f, x0, OptimizerConfig(method=method, maxiter=m1 + extra))
    assert b.best_f <= a.best_f
    # the shorter run is a prefix of the longer one
    assert b.trajectory[: a.evaluations] == a.trajectory


@pytest.mark.parametrize("method", METHODS)
def test_deterministic(method):
    f, x0 = _problem(3, 7)
    cfg = OptimizerConfig(method=method, maxiter=100, seed=5)
    assert minimize(f, x0, cfg).trajectory == minimize(f, x0, cfg).trajectory


def test_one_dimensional():
    res = minimize(lambda x: (x[0] - 2.0) ** 2, [0.0], OptimizerConfig(maxiter=100))
    assert res.best_f <= 1e-8


def test_trajectory_csv(tmp_path):
    res = minimize(sphere, np.ones(2), OptimizerConfig(maxiter=20))
    lines = write_trajectory_csv(res.trajectory, tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "evaluation,f"
    assert len(lines) == res.evaluations + 1
