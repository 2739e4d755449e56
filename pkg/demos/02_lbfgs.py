"""
Limited-memory BFGS with a strong Wolfe line search
===================================================

The optimiser behind logistic regression and the multilayer perceptron,
shown on the Rosenbrock valley and on a convex quadratic.
"""
import numpy as np

from spamlab.numopt import SmoothProblem, finite_diff_gradient, lbfgs_minimize


def rosen(x):
    return (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2


def rosen_grad(x):
    return np.array([-2 * (1 - x[0]) - 400 * x[0] * (x[1] - x[0] ** 2), 200 * (x[1] - x[0] ** 2)])


x0 = np.array([-1.2, 1.0])
# analytic gradients should agree with central differences
print("gradient check:", np.abs(rosen_grad(x0) - finite_diff_gradient(rosen, x0)).max())

res = lbfgs_minimize(SmoothProblem(2, rosen, rosen_grad), x0, grad_tol=1e-10, max_iter=500)
print(res.status.value, "after", res.iterations, "iterations:", res.minimizer)

# on a quadratic, memory equal to the dimension behaves like conjugate gradients
r = np.random.default_rng(0)
M = r.normal(size=(20, 20))
A, b = M @ M.T + 0.5 * np.eye(20), r.normal(size=20)
quad = SmoothProblem(20, lambda x: 0.5 * x @ A @ x - b @ x, lambda x: A @ x - b)
for memory, c2 in ((20, 0.1), (10, 0.9)):
    res = lbfgs_minimize(quad, np.zeros(20), memory=memory, c2=c2, grad_tol=1e-6)
    print(f"memory={memory} c2={c2}: {res.iterations} iterations, |g|={res.gradient_norm:.1e}")
