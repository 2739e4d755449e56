"""Multinomial, Gaussian and Bernoulli naive Bayes.

All arithmetic happens in log space. Class index 0 is ham and 1 is spam.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._common import as_2d, class_log_priors


@dataclass
class MnbModel:
    log_priors: np.ndarray
    word_log_probs: np.ndarray

    @property
    def n_features(self) -> int:
        return self.word_log_probs.shape[1]

    def joint_log_likelihood(self, X) -> np.ndarray:
        return as_2d(X) @ self.word_log_probs.T + self.log_priors

    def to_dict(self):
        return {"log_priors": self.log_priors.tolist(), "word_log_probs": self.word_log_probs.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["log_priors"]), np.asarray(d["word_log_probs"]))


def mnb_fit(X, y) -> MnbModel:
    """Add-one smoothed word probabilities ``(F_nc + 1) / (sum_x F_xc + N)``."""
    X = as_2d(X).astype(float)
    y = np.asarray(y)
    n_words = X.shape[1]
    word_counts = np.vstack([X[y == c].sum(axis=0) for c in (0, 1)])
    probs = (word_counts + 1.0) / (word_counts.sum(axis=1, keepdims=True) + n_words)
    return MnbModel(class_log_priors(y), np.log(probs))


def mnb_score(model: MnbModel, x) -> np.ndarray:
    """Per-class log posterior up to a class-independent constant.

    The multinomial coefficient and the evidence term are dropped; they do
    not change the argmax.
    """
    out = model.joint_log_likelihood(x)
    return out[0] if np.ndim(x) == 1 else out


@dataclass
class GnbModel:
    log_priors: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    @property
    def n_features(self) -> int:
        return self.means.shape[1]

    def joint_log_likelihood(self, X) -> np.ndarray:
        X = as_2d(X).astype(float)
        out = np.empty((X.shape[0], 2))
        for c in (0, 1):
            var = self.variances[c]
            ll = -0.5 * np.sum(np.log(2.0 * np.pi * var)) - 0.5 * np.sum((X - self.means[c]) ** 2 / var, axis=1)
            out[:, c] = ll + self.log_priors[c]
        return out

    def to_dict(self):
        return {"log_priors": self.log_priors.tolist(), "means": self.means.tolist(), "variances": self.variances.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["log_priors"]), np.asarray(d["means"]), np.asarray(d["variances"]))


def gnb_fit(X, y, var_smoothing: float = 1e-9) -> GnbModel:
    """Maximum-likelihood class-conditional means and variances.

    Every variance is inflated by ``var_smoothing`` times the largest feature
    variance of the whole training matrix (or by ``var_smoothing`` itself if
    every feature is constant), so densities stay finite.
    """
    X = as_2d(X).astype(float)
    y = np.asarray(y)
    eps = var_smoothing * float(np.var(X, axis=0).max(initial=0.0))
    if eps <= 0.0:
        eps = var_smoothing
    means = np.vstack([X[y == c].mean(axis=0) for c in (0, 1)])
    variances = np.vstack([X[y == c].var(axis=0) for c in (0, 1)]) + eps
    return GnbModel(class_log_priors(y), means, variances)


def gnb_score(model: GnbModel, x) -> np.ndarray:
    out = model.joint_log_likelihood(x)
    return out[0] if np.ndim(x) == 1 else out


@dataclass
class BnbModel:
    log_priors: np.ndarray
    presence_probs: np.ndarray

    @property
    def n_features(self) -> int:
        return self.presence_probs.shape[1]

    def joint_log_likelihood(self, X) -> np.ndarray:
        B = (as_2d(X) > 0).astype(float)
        logp, log1m = np.log(self.presence_probs), np.log1p(-self.presence_probs)
        return B @ (logp - log1m).T + log1m.sum(axis=1) + self.log_priors

    def to_dict(self):
        return {"log_priors": self.log_priors.tolist(), "presence_probs": self.presence_probs.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["log_priors"]), np.asarray(d["presence_probs"]))


def bnb_fit(X, y) -> BnbModel:
    """Presence probabilities ``(docs in c containing w + 1) / (docs in c + 2)``."""
    B = (as_2d(X) > 0).astype(float)
    y = np.asarray(y)
    probs = np.vstack([(B[y == c].sum(axis=0) + 1.0) / ((y == c).sum() + 2.0) for c in (0, 1)])
    return BnbModel(class_log_priors(y), probs)


def bnb_score(model: BnbModel, x) -> np.ndarray:
    out = model.joint_log_likelihood(x)
    return out[0] if np.ndim(x) == 1 else out


def log_posterior(model, X) -> np.ndarray:
    """Normalised log posteriors, shape (n, 2)."""
    jll = model.joint_log_likelihood(X)
    return jll - logsumexp(jll, axis=1, keepdims=True)


def log_odds(model, X) -> np.ndarray:
    """``log Pr(spam | x) - log Pr(ham | x)`` for each row."""
    jll = model.joint_log_likelihood(X)
    return jll[:, 1] - jll[:, 0]
