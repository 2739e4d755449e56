"""Independent reference computations used only by the tests.

Each oracle recomputes a quantity from its textbook definition, without
calling into the code it checks.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
from scipy import integrate, optimize


# -- naive Bayes ---------------------------------------------------------------

def mnb_exact_log_posterior(X_train, y_train, x):
    """Log posteriors from the multinomial model with every constant kept.

    Word probabilities are exact Fractions with add-one smoothing; the
    likelihood includes the multinomial coefficient ``n! / prod f_i!`` and the
    posterior is normalised by the evidence.
    """
    X_train = [[int(v) for v in row] for row in X_train]
    n_words = len(X_train[0])
    x = [int(v) for v in x]
    n = sum(x)
    log_coef = math.lgamma(n + 1) - sum(math.lgamma(f + 1) for f in x)
    joint = []
    for c in (0, 1):
        docs = [row for row, lab in zip(X_train, y_train) if lab == c]
        prior = Fraction(len(docs), len(X_train))
        F = [sum(d[j] for d in docs) for j in range(n_words)]
        total = sum(F)
        probs = [Fraction(F[j] + 1, total + n_words) for j in range(n_words)]
        lj = math.log(prior) + log_coef + sum(f * math.log(p) for f, p in zip(x, probs) if f)
        joint.append(lj)
    m = max(joint)
    evidence = m + math.log(sum(math.exp(v - m) for v in joint))
    return [v - evidence for v in joint]


def bnb_exact_log_posterior(X_train, y_train, x):
    """Log posteriors from the Bernoulli product, absence terms included."""
    B = [[1 if v > 0 else 0 for v in row] for row in X_train]
    b = [1 if v > 0 else 0 for v in x]
    joint = []
    for c in (0, 1):
        docs = [row for row, lab in zip(B, y_train) if lab == c]
        prior = Fraction(len(docs), len(B))
        like = prior
        for j, bit in enumerate(b):
            p = Fraction(sum(d[j] for d in docs) + 1, len(docs) + 2)
            like *= p if bit else (1 - p)
        joint.append(like)
    ev = sum(joint)
    return [math.log(v / ev) for v in joint]


def gaussian_log_density(x, mean, var):
    return -0.5 * math.log(2.0 * math.pi * var) - (x - mean) ** 2 / (2.0 * var)


# -- ROC -------------------------------------------------------------------------

def mann_whitney_auc(scores, labels):
    """P(score_pos > score_neg) + 0.5 P(tie), by direct pair counting."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    pos, neg = s[y == 1], s[y == 0]
    gt = (pos[:, None] > neg[None, :]).sum()
    eq = (pos[:, None] == neg[None, :]).sum()
    return (gt + 0.5 * eq) / (len(pos) * len(neg))


# -- Student t -------------------------------------------------------------------

def t_density(x, df):
    c = math.exp(math.lgamma((df + 1) / 2) - math.lgamma(df / 2)) / math.sqrt(df * math.pi)
    return c * (1 + x * x / df) ** (-(df + 1) / 2)


def t_two_sided_quadrature(t, df):
    """``2 * integral_{|t|}^{inf} density``; the central part is integrated when it is smaller."""
    t = abs(t)
    if t < 1.0:
        centre, _ = integrate.quad(t_density, 0.0, t, args=(df,), epsabs=1e-14, epsrel=1e-13)
        return 1.0 - 2.0 * centre
    tail, _ = integrate.quad(t_density, t, np.inf, args=(df,), epsabs=1e-14, epsrel=1e-13)
    return 2.0 * tail


# -- SVM dual ----------------------------------------------------------------------

def svm_dual_optimum(K, y, c):
    """Maximum of ``sum(a) - 0.5 (a y)^T K (a y)`` over ``0 <= a <= c``, ``y.a = 0``.

    Solved as a small quadratic program by SLSQP from two starting points.
    """
    y = np.asarray(y, dtype=float)
    Q = (y[:, None] * y[None, :]) * K
    n = len(y)

    def neg(a):
        return -(a.sum() - 0.5 * a @ Q @ a)

    def neg_grad(a):
        return -(1.0 - Q @ a)

    cons = [{"type": "eq", "fun": lambda a: y @ a, "jac": lambda a: y}]
    best = None
    for a0 in (np.zeros(n), np.full(n, c / 2.0)):
        res = optimize.minimize(neg, a0, jac=neg_grad, bounds=[(0.0, c)] * n, constraints=cons,
                                method="SLSQP", options={"ftol": 1e-15, "maxiter": 1000})
        a = np.clip(res.x, 0.0, c)
        if abs(y @ a) > 1e-8:
            continue
        if best is None or -neg(a) > best[0]:
            best = (-neg(a), a)
    return best


# -- optimisation ------------------------------------------------------------------

def rosenbrock(x):
    return (1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2


def grid_then_simplex(f, lo, hi, n=81):
    """Best point of an ``n x n`` grid, refined by Nelder-Mead."""
    g = np.linspace(lo, hi, n)
    best = min(itertools.product(g, g), key=lambda p: f(np.array(p)))
    res = optimize.minimize(f, np.array(best), method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20000})
    return res.x


# -- trees ---------------------------------------------------------------------------

def gini(counts):
    n = sum(counts)
    return 1.0 - sum((c / n) ** 2 for c in counts)


def exhaustive_gini_split(X, y):
    """Every (feature, midpoint) pair; returns ``(decrease, feature, threshold)`` of the best, first wins."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    n = len(y)
    parent = gini([np.sum(y == 0), np.sum(y == 1)])
    best = (-np.inf, None, None)
    for j in range(X.shape[1]):
        vals = sorted(set(X[:, j].tolist()))
        for a, b in zip(vals, vals[1:]):
            t = 0.5 * (a + b)
            left, right = y[X[:, j] <= t], y[X[:, j] > t]
            child = sum(len(s) / n * gini([np.sum(s == 0), np.sum(s == 1)]) for s in (left, right))
            dec = parent - child
            if dec > best[0] + 1e-15:
                best = (dec, j, t)
    return best


def exhaustive_stump(X, y, lam, gamma):
    """Best depth-1 boosting split at zero margin, gain and leaf weights from hand sums."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    g = 0.5 - y
    h = np.full(len(y), 0.25)
    G, H = g.sum(), h.sum()
    best = (0.0, None, None, None, None)
    for j in range(X.shape[1]):
        vals = sorted(set(X[:, j].tolist()))
        for a, b in zip(vals, vals[1:]):
            t = 0.5 * (a + b)
            m = X[:, j] <= t
            GL, HL = g[m].sum(), h[m].sum()
            GR, HR = G - GL, H - HL
            gain = 0.5 * (GL ** 2 / (HL + lam) + GR ** 2 / (HR + lam) - G ** 2 / (H + lam)) - gamma
            if gain > best[0] + 1e-15:
                best = (gain, j, t, -GL / (HL + lam), -GR / (HR + lam))
    return best


# -- Shapley -------------------------------------------------------------------------

def shapley_bruteforce(f, x, background):
    """Shapley values straight from the subset-sum definition, one coalition at a time."""
    x = np.asarray(x, dtype=float)
    bg = np.atleast_2d(np.asarray(background, dtype=float))
    n = len(x)

    def v(S):
        rows = bg.copy()
        rows[:, list(S)] = x[list(S)]
        return float(np.mean(f(rows)))

    cache = {}
    for k in range(n + 1):
        for S in itertools.combinations(range(n), k):
            cache[S] = v(S)
    phi = []
    for i in range(n):
        rest = [j for j in range(n) if j != i]
        total = 0.0
        for k in range(n):
            w = Fraction(math.factorial(k) * math.factorial(n - k - 1), math.factorial(n))
            for S in itertools.combinations(rest, k):
                total += float(w) * (cache[tuple(sorted(S + (i,)))] - cache[S])
        phi.append(total)
    return np.array(phi), cache[()], cache[tuple(range(n))]
