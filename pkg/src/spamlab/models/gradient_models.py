"""Logistic regression and a multilayer perceptron, both trained with L-BFGS.

Inputs are standardised with the training mean and standard deviation
before either model sees them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ._common import as_2d, standardizer
from .._rng import make_rng
from ..numopt import OptResult, SmoothProblem, lbfgs_minimize


def logistic(z):
    """Numerically stable ``e^z / (1 + e^z)``."""
    return expit(z)


# -- logistic regression ---------------------------------------------------

def logreg_objective(theta, X, y, l2_strength):
    """Penalised negative log-likelihood and its gradient.

    ``theta = [intercept, weights...]``; the intercept is not penalised.
    """
    b0, w = theta[0], theta[1:]
    z = b0 + X @ w
    nll = float(np.sum(np.logaddexp(0.0, z) - y * z)) + 0.5 * l2_strength * float(w @ w)
    r = logistic(z) - y
    grad = np.empty_like(theta)
    grad[0] = r.sum()
    grad[1:] = X.T @ r + l2_strength * w
    return nll, grad


@dataclass
class LogRegModel:
    intercept: float
    weights: np.ndarray
    l2_strength: float
    mean: np.ndarray
    scale: np.ndarray
    status: str = ""
    iterations: int = 0

    def linear_score(self, X) -> np.ndarray:
        Z = (as_2d(X) - self.mean) / self.scale
        return self.intercept + Z @ self.weights

    def decision(self, X) -> np.ndarray:
        return logistic(self.linear_score(X))

    def to_dict(self):
        return {"intercept": self.intercept, "weights": self.weights.tolist(), "l2_strength": self.l2_strength,
                "mean": self.mean.tolist(), "scale": self.scale.tolist(), "status": self.status,
                "iterations": self.iterations}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["intercept"]), np.asarray(d["weights"], dtype=float), float(d["l2_strength"]),
                   np.asarray(d["mean"], dtype=float), np.asarray(d["scale"], dtype=float), d["status"],
                   int(d["iterations"]))


def logreg_fit(X, y, l2_strength: float = 1.0, max_iter: int = 25, grad_tol: float = 1e-5,
               standardize: bool = True) -> LogRegModel:
    X = as_2d(X).astype(float)
    y = np.asarray(y, dtype=float)
    if standardize:
        mean, scale = standardizer(X)
    else:
        mean, scale = np.zeros(X.shape[1]), np.ones(X.shape[1])
    Z = (X - mean) / scale
    problem = SmoothProblem.from_value_and_grad(lambda t: logreg_objective(t, Z, y, l2_strength), Z.shape[1] + 1)
    res = lbfgs_minimize(problem, np.zeros(Z.shape[1] + 1), max_iter=max_iter, grad_tol=grad_tol)
    return LogRegModel(float(res.minimizer[0]), res.minimizer[1:].copy(), l2_strength, mean, scale,
                       res.status.value, res.iterations)


def logreg_proba(model: LogRegModel, x):
    p = model.decision(x)
    return float(p[0]) if np.ndim(x) == 1 else p


# -- multilayer perceptron -------------------------------------------------

def layer_shapes(sizes):
    return [(sizes[i], sizes[i + 1]) for i in range(len(sizes) - 1)]


def n_params(sizes) -> int:
    return sum(a * b + b for a, b in layer_shapes(sizes))


def unpack(theta, sizes):
    out, pos = [], 0
    for a, b in layer_shapes(sizes):
        W = theta[pos:pos + a * b].reshape(a, b)
        pos += a * b
        out.append((W, theta[pos:pos + b]))
        pos += b
    return out


def mlp_forward(theta, X, sizes) -> np.ndarray:
    """Output-layer pre-activation (the logit) for each row."""
    h = X
    layers = unpack(theta, sizes)
    for W, bias in layers[:-1]:
        h = np.maximum(h @ W + bias, 0.0)
    W, bias = layers[-1]
    return (h @ W + bias)[:, 0]


def mlp_objective(theta, X, y, sizes, l2):
    """Mean cross-entropy plus ``l2 / (2 n) * sum(W^2)`` over weight matrices, with gradient."""
    n = X.shape[0]
    layers = unpack(theta, sizes)
    acts = [X]
    pre = []
    h = X
    for W, bias in layers[:-1]:
        z = h @ W + bias
        pre.append(z)
        h = np.maximum(z, 0.0)
        acts.append(h)
    W_out, b_out = layers[-1]
    z = (h @ W_out + b_out)[:, 0]
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
    loss += 0.5 * l2 / n * sum(float(np.sum(W * W)) for W, _ in layers)

    grads = []
    delta = ((logistic(z) - y) / n)[:, None]
    for li in range(len(layers) - 1, -1, -1):
        W, _ = layers[li]
        a = acts[li]
        gW = a.T @ delta + (l2 / n) * W
        gb = delta.sum(axis=0)
        grads.append((gW, gb))
        if li > 0:
            delta = (delta @ W.T) * (pre[li - 1] > 0)
    grads.reverse()
    g = np.concatenate([np.concatenate([gW.ravel(), gb]) for gW, gb in grads])
    return loss, g


def mlp_init(sizes, seed: int) -> np.ndarray:
    """Weights uniform in ``+-sqrt(6 / fan_in)``, biases zero."""
    rng = make_rng(seed)
    parts = []
    for a, b in layer_shapes(sizes):
        bound = np.sqrt(6.0 / a)
        parts.append(rng.uniform(-bound, bound, size=a * b))
        parts.append(np.zeros(b))
    return np.concatenate(parts)


@dataclass
class MlpModel:
    sizes: list[int]
    theta: np.ndarray
    mean: np.ndarray
    scale: np.ndarray
    l2: float = 1e-4
    status: str = ""
    iterations: int = 0
    loss_trace: list | None = None

    @property
    def layers(self):
        return unpack(self.theta, self.sizes)

    def logit(self, X) -> np.ndarray:
        return mlp_forward(self.theta, (as_2d(X) - self.mean) / self.scale, self.sizes)

    def decision(self, X) -> np.ndarray:
        return logistic(self.logit(X))

    def to_dict(self):
        return {"sizes": list(self.sizes), "theta": self.theta.tolist(), "mean": self.mean.tolist(),
                "scale": self.scale.tolist(), "l2": self.l2, "status": self.status, "iterations": self.iterations}

    @classmethod
    def from_dict(cls, d):
        return cls(list(d["sizes"]), np.asarray(d["theta"], dtype=float), np.asarray(d["mean"], dtype=float),
                   np.asarray(d["scale"], dtype=float), float(d["l2"]), d["status"], int(d["iterations"]))


def mlp_fit(X, y, hidden=(50,), max_iter: int = 10000, l2: float = 1e-4, seed: int = 0,
            grad_tol: float = 1e-5, ftol: float = 2.2e-9, standardize: bool = True) -> MlpModel:
    """ReLU hidden layers, logistic output, cross-entropy loss, L-BFGS training.

    ``ftol`` stops training once one step improves the loss by less than that
    relative amount; pass 0 to run until ``grad_tol`` or ``max_iter``.
    """
    X = as_2d(X).astype(float)
    y = np.asarray(y, dtype=float)
    if standardize:
        mean, scale = standardizer(X)
    else:
        mean, scale = np.zeros(X.shape[1]), np.ones(X.shape[1])
    Z = (X - mean) / scale
    sizes = [X.shape[1], *[int(h) for h in hidden], 1]
    theta0 = mlp_init(sizes, seed)
    problem = SmoothProblem.from_value_and_grad(lambda t: mlp_objective(t, Z, y, sizes, l2), len(theta0))
    res: OptResult = lbfgs_minimize(problem, theta0, max_iter=max_iter, grad_tol=grad_tol, ftol=ftol, ls_retries=5)
    return MlpModel(sizes, res.minimizer.copy(), mean, scale, l2, res.status.value, res.iterations, res.values)


def mlp_proba(model: MlpModel, x):
    p = model.decision(x)
    return float(p[0]) if np.ndim(x) == 1 else p
