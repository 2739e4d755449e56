import numpy as np
import pytest

from oracles import grid_then_simplex, rosenbrock
from spamlab.errors import NumericalFailure
from spamlab.numopt import SmoothProblem, Status, finite_diff_gradient, lbfgs_minimize, wolfe_line_search


def _quadratic(A, b):
    return SmoothProblem(len(b), lambda x: 0.5 * x @ A @ x - b @ x, lambda x: A @ x - b)


def test_shifted_quadratic():
    c = np.array([1.0, 2.0, 3.0])
    p = SmoothProblem(3, lambda x: float(np.sum((x - c) ** 2)), lambda x: 2 * (x - c))
    res = lbfgs_minimize(p, np.zeros(3), grad_tol=1e-10)
    assert res.converged
    assert np.allclose(res.minimizer, c, atol=1e-8)
    assert res.value < 1e-8


def test_rosenbrock_matches_independent_oracle():
    grad = lambda x: np.array([-2 * (1 - x[0]) - 400 * x[0] * (x[1] - x[0] ** 2), 200 * (x[1] - x[0] ** 2)])
    p = SmoothProblem(2, rosenbrock, grad)
    res = lbfgs_minimize(p, np.array([-1.2, 1.0]), grad_tol=1e-10, max_iter=500)
    oracle = grid_then_simplex(rosenbrock, -2.0, 2.0)
    assert np.allclose(oracle, [1.0, 1.0], atol=1e-5)
    assert np.allclose(res.minimizer, oracle, atol=1e-5)


def test_max_iter_zero_returns_start():
    p = _quadratic(np.eye(2), np.ones(2))
    x0 = np.array([3.0, -1.0])
    res = lbfgs_minimize(p, x0, max_iter=0)
    assert res.status is Status.ITER_CAP
    assert np.array_equal(res.minimizer, x0)


def random_spd(dim, seed):
    r = np.random.default_rng(seed)
    M = r.normal(size=(dim, dim))
    return M @ M.T + 0.5 * np.eye(dim), r.normal(size=dim)


@pytest.mark.parametrize("dim", [2, 5, 10, 15, 20])
def test_convex_quadratics_converge_in_50_iterations(dim):
    # memory = dimension with a tight curvature condition keeps the
    # conjugate-direction behaviour on quadratics
    for seed in range(10):
        A, b = random_spd(dim, 1000 * dim + seed)
        res = lbfgs_minimize(_quadratic(A, b), np.zeros(dim), memory=dim, c2=0.1, max_iter=50, grad_tol=1e-6)
        assert res.converged and res.iterations <= 50
        assert np.linalg.norm(A @ res.minimizer - b) < 1e-6


def test_convex_quadratics_default_constants_converge():
    for seed in range(10):
        A, b = random_spd(20, seed)
        res = lbfgs_minimize(_quadratic(A, b), np.zeros(20), max_iter=200, grad_tol=1e-6)
        assert res.converged and res.iterations <= 100


def test_values_non_increasing():
    grad = lambda x: np.array([-2 * (1 - x[0]) - 400 * x[0] * (x[1] - x[0] ** 2), 200 * (x[1] - x[0] ** 2)])
    res = lbfgs_minimize(SmoothProblem(2, rosenbrock, grad), np.array([-1.2, 1.0]))
    assert all(b <= a for a, b in zip(res.values, res.values[1:]))


def test_wolfe_conditions_hold():
    A = np.diag([1.0, 10.0])
    p = _quadratic(A, np.zeros(2))
    x = np.array([1.0, 1.0])
    f0, g0 = p.evaluate(x)
    d = -g0
    alpha, f1, g1, _, ok = wolfe_line_search(p, x, f0, g0, d, 1.0, 1e-4, 0.9)
    assert ok
    assert f1 <= f0 + 1e-4 * alpha * (g0 @ d)
    assert abs(g1 @ d) <= 0.9 * abs(g0 @ d)


def test_non_finite_objective_raises():
    p = SmoothProblem(1, lambda x: float("nan"), lambda x: np.zeros(1))
    with pytest.raises(NumericalFailure):
        lbfgs_minimize(p, np.zeros(1))


def test_finite_difference_examples():
    assert finite_diff_gradient(lambda x: x[0] ** 2, [3.0], h=1e-5)[0] == pytest.approx(6.0, abs=1e-6)
    assert np.array_equal(finite_diff_gradient(lambda x: 4.0, [1.0, 2.0]), [0.0, 0.0])
    assert np.allclose(finite_diff_gradient(lambda x: x[0] * x[1], [2.0, 5.0], h=1e-5), [5.0, 2.0], atol=1e-6)
    with pytest.raises(ValueError):
        finite_diff_gradient(lambda x: 0.0, [1.0], h=0.0)
