"""Limited-memory BFGS with a strong Wolfe line search.

Used to train logistic regression and the multilayer perceptron. The
finite-difference gradient is kept here as the oracle for gradient checks.
"""
from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import NumericalFailure

Array = np.ndarray


class Status(str, enum.Enum):
    CONVERGED = "converged"
    ITER_CAP = "iter_cap"
    LINE_SEARCH_FAIL = "line_search_fail"
    # relative objective change fell below ftol (only when ftol > 0)
    STALLED = "stalled"


@dataclass
class SmoothProblem:
    dimension: int
    objective: Callable[[Array], float]
    gradient: Callable[[Array], Array]
    value_and_grad: Callable[[Array], tuple[float, Array]] | None = None

    @classmethod
    def from_value_and_grad(cls, fg: Callable[[Array], tuple[float, Array]], dimension: int) -> "SmoothProblem":
        return cls(dimension, lambda x: fg(x)[0], lambda x: fg(x)[1], fg)

    def evaluate(self, x: Array) -> tuple[float, Array]:
        if self.value_and_grad is not None:
            f, g = self.value_and_grad(x)
        else:
            f, g = self.objective(x), self.gradient(x)
        f = float(f)
        g = np.asarray(g, dtype=float)
        if g.shape != (self.dimension,):
            raise ValueError(f"gradient has shape {g.shape}, expected ({self.dimension},)")
        if not math.isfinite(f) or not np.all(np.isfinite(g)):
            raise NumericalFailure("objective or gradient is not finite")
        return f, g


@dataclass
class OptResult:
    minimizer: Array
    value: float
    gradient_norm: float
    iterations: int
    status: Status
    n_evals: int = 0
    values: list[float] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


def _interpolate(a_lo, f_lo, d_lo, a_hi, f_hi):
    # minimiser of the quadratic through (a_lo, f_lo, d_lo) and (a_hi, f_hi),
    # safeguarded into the middle 80% of the bracket
    span = a_hi - a_lo
    denom = 2.0 * (f_hi - f_lo - d_lo * span)
    lo, hi = sorted((a_lo + 0.1 * span, a_hi - 0.1 * span))
    if denom > 0:
        a = a_lo - d_lo * span * span / denom
        if lo <= a <= hi:
            return a
    return 0.5 * (a_lo + a_hi)


def wolfe_line_search(problem: SmoothProblem, x: Array, f0: float, g0: Array, p: Array,
                      a_init: float = 1.0, c1: float = 1e-4, c2: float = 0.9, max_evals: int = 40):
    """Strong Wolfe step along descent direction ``p``.

    Returns ``(alpha, f, g, n_evals, ok)``. When ``ok`` is False no step met
    both conditions and alpha, f, g describe the best sufficient-decrease
    point seen (alpha 0 if there was none).
    """
    d0 = float(g0 @ p)
    best = (0.0, f0, g0)
    evals = 0

    def phi(a):
        nonlocal evals, best
        evals += 1
        f, g = problem.evaluate(x + a * p)
        if f < best[1] and f <= f0 + c1 * a * d0:
            best = (a, f, g)
        return f, g, float(g @ p)

    def zoom(a_lo, f_lo, d_lo, a_hi, f_hi):
        while evals < max_evals:
            a = _interpolate(a_lo, f_lo, d_lo, a_hi, f_hi)
            f, g, d = phi(a)
            if f > f0 + c1 * a * d0 or f >= f_lo:
                a_hi, f_hi = a, f
            else:
                if abs(d) <= -c2 * d0:
                    return a, f, g
                if d * (a_hi - a_lo) >= 0:
                    a_hi, f_hi = a_lo, f_lo
                a_lo, f_lo, d_lo = a, f, d
            if abs(a_hi - a_lo) < 1e-16 * max(1.0, abs(a_lo)):
                break
        return None

    a_prev, f_prev, d_prev = 0.0, f0, d0
    a = a_init
    for i in range(max_evals):
        f, g, d = phi(a)
        if f > f0 + c1 * a * d0 or (i > 0 and f >= f_prev):
            hit = zoom(a_prev, f_prev, d_prev, a, f)
            break
        if abs(d) <= -c2 * d0:
            return a, f, g, evals, True
        if d >= 0:
            hit = zoom(a, f, d, a_prev, f_prev)
            break
        a_prev, f_prev, d_prev = a, f, d
        a = 2.0 * a
        if evals >= max_evals:
            hit = None
            break
    else:
        hit = None
    if hit is not None:
        return hit[0], hit[1], hit[2], evals, True
    a_best, f_best, g_best = best
    return a_best, f_best, g_best, evals, False


def lbfgs_minimize(problem: SmoothProblem, x0, memory: int = 10, max_iter: int = 1000,
                   grad_tol: float = 1e-5, ftol: float = 0.0, c1: float = 1e-4, c2: float = 0.9,
                   ls_retries: int = 0) -> OptResult:
    """Minimise a smooth function with L-BFGS.

    Stops when the Euclidean gradient norm drops to ``grad_tol``, after
    ``max_iter`` accepted steps, when the line search fails, or (if
    ``ftol > 0``) when the relative decrease of one step is below ``ftol``.

    With ``ls_retries > 0`` a failed line search that still found a
    sufficient-decrease point takes that point, clears the curvature memory
    and carries on; only ``ls_retries + 1`` consecutive failures end the run.
    Piecewise-linear activations need this, since a minimiser sitting on a
    kink admits no strong Wolfe step.
    """
    if memory < 1:
        raise ValueError("memory must be at least 1")
    x = np.array(x0, dtype=float)
    f, g = problem.evaluate(x)
    n_evals = 1
    s_hist: deque[Array] = deque(maxlen=memory)
    y_hist: deque[Array] = deque(maxlen=memory)
    rho_hist: deque[float] = deque(maxlen=memory)
    values = [f]
    it = 0
    failures = 0

    def result(status):
        return OptResult(x, f, float(np.linalg.norm(g)), it, status, n_evals, values)

    while True:
        if np.linalg.norm(g) <= grad_tol:
            return result(Status.CONVERGED)
        if it >= max_iter:
            return result(Status.ITER_CAP)

        # two-loop recursion
        q = -g.copy()
        alphas = []
        for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
            a = rho * (s @ q)
            alphas.append(a)
            q -= a * y
        if s_hist:
            q *= (s_hist[-1] @ y_hist[-1]) / (y_hist[-1] @ y_hist[-1])
        for (s, y, rho), a in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
            b = rho * (y @ q)
            q += (a - b) * s
        p = q
        if not g @ p < 0:
            s_hist.clear(); y_hist.clear(); rho_hist.clear()
            p = -g
        a_init = 1.0 if s_hist else min(1.0, 1.0 / float(np.linalg.norm(g)))

        alpha, f_new, g_new, ev, ok = wolfe_line_search(problem, x, f, g, p, a_init, c1, c2)
        n_evals += ev
        if not ok:
            failures += 1
            if alpha > 0 and f_new < f:
                # keep the best sufficient-decrease point found before giving up
                x, f, g = x + alpha * p, f_new, g_new
                values.append(f)
                if failures <= ls_retries:
                    it += 1
                    s_hist.clear(); y_hist.clear(); rho_hist.clear()
                    continue
            return result(Status.LINE_SEARCH_FAIL)
        failures = 0

        x_new = x + alpha * p
        s, y = x_new - x, g_new - g
        sy = float(s @ y)
        if sy > 1e-10 * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            s_hist.append(s); y_hist.append(y); rho_hist.append(1.0 / sy)
        f_old = f
        x, f, g = x_new, f_new, g_new
        it += 1
        values.append(f)
        if ftol > 0 and (f_old - f) <= ftol * max(abs(f_old), abs(f), 1.0):
            return result(Status.STALLED)


def finite_diff_gradient(objective: Callable[[Array], float], x, h: float = 1e-6) -> Array:
    """Central-difference gradient, ``(f(x + h e_i) - f(x - h e_i)) / 2h``."""
    if not h > 0:
        raise ValueError("step h must be positive")
    x = np.array(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e.flat[i] = h
        fp, fm = float(objective(x + e)), float(objective(x - e))
        if not (math.isfinite(fp) and math.isfinite(fm)):
            raise NumericalFailure(f"non-finite objective at coordinate {i}")
        grad.flat[i] = (fp - fm) / (2.0 * h)
    return grad
