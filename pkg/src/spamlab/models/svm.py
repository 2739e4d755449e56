"""Soft-margin kernel SVM trained by sequential minimal optimisation.

The solver follows Platt's pairwise scheme with an error cache: each epoch
walks every training example once, and every example that violates the KKT
conditions by more than ``kkt_tol`` is paired with a second multiplier
chosen by the largest ``|E1 - E2|``. Labels are +1 (spam) and -1 (ham).
"""
from __future__ import annotations

import enum
import math
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from ._common import as_2d
from ..errors import DegenerateTrainingError


class KernelKind(str, enum.Enum):
    LINEAR = "linear"
    POLY = "poly"
    SIGMOID = "sigmoid"
    RBF = "rbf"


@dataclass(frozen=True)
class KernelSpec:
    kind: KernelKind = KernelKind.LINEAR
    degree: int = 3
    r: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        if self.degree < 1:
            raise ValueError("polynomial degree must be >= 1")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")

    @property
    def sigma(self) -> float:
        """RBF width: ``gamma = 1 / (2 sigma^2)``."""
        return math.sqrt(1.0 / (2.0 * self.gamma))

    @classmethod
    def rbf_from_sigma(cls, sigma: float) -> "KernelSpec":
        return cls(KernelKind.RBF, gamma=1.0 / (2.0 * sigma * sigma))

    def to_dict(self):
        return {"kind": self.kind.value, "degree": self.degree, "r": self.r, "gamma": self.gamma}


def kernel_eval(spec: KernelSpec, u, v) -> float:
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(gram(spec, u[None, :], v[None, :])[0, 0])


def gram(spec: KernelSpec, A, B) -> np.ndarray:
    """Kernel matrix ``K[i, j] = K(A[i], B[j])``."""
    A, B = np.asarray(A, dtype=float), np.asarray(B, dtype=float)
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if spec.kind is KernelKind.RBF:
        sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * (A @ B.T)
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-spec.gamma * sq)
    dot = A @ B.T
    if spec.kind is KernelKind.LINEAR:
        return dot
    if spec.kind is KernelKind.POLY:
        return (dot + 1.0) ** spec.degree
    return np.tanh(dot + spec.r)


class _RowCache:
    """LRU cache of kernel rows ``K(X, x_i)``.

    Rows come from one matrix-vector product (sparse when most counts are
    zero) plus precomputed squared norms, which is much cheaper than a
    general ``gram`` call per row.
    """

    def __init__(self, X, spec, max_rows):
        self.X, self.spec, self.max_rows = X, spec, max(2, max_rows)
        self.rows: OrderedDict[int, np.ndarray] = OrderedDict()
        density = np.count_nonzero(X) / max(X.size, 1)
        self.M = sparse.csr_matrix(X) if density < 0.3 else X
        self.sq = np.einsum("ij,ij->i", X, X)

    def _apply(self, dot, sq_other):
        spec = self.spec
        if spec.kind is KernelKind.RBF:
            d = self.sq + sq_other - 2.0 * dot
            np.maximum(d, 0.0, out=d)
            return np.exp(-spec.gamma * d)
        if spec.kind is KernelKind.LINEAR:
            return dot
        if spec.kind is KernelKind.POLY:
            return (dot + 1.0) ** spec.degree
        return np.tanh(dot + spec.r)

    def __call__(self, i: int) -> np.ndarray:
        row = self.rows.get(i)
        if row is None:
            row = self._apply(np.asarray(self.M @ self.X[i]).ravel(), self.sq[i])
            self.rows[i] = row
            if len(self.rows) > self.max_rows:
                self.rows.popitem(last=False)
        else:
            self.rows.move_to_end(i)
        return row

    def entry(self, i: int, j: int) -> float:
        row = self.rows.get(i)
        if row is not None:
            return float(row[j])
        row = self.rows.get(j)
        if row is not None:
            return float(row[i])
        return float(gram(self.spec, self.X[i:i + 1], self.X[j:j + 1])[0, 0])


@dataclass
class SvmModel:
    support_vectors: np.ndarray
    dual_coef: np.ndarray          # alpha_i * y_i for each support vector
    bias: float
    kernel: KernelSpec
    c: float
    epochs: int = 0
    converged: bool = False
    max_kkt_violation: float = float("nan")
    support_index: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def alphas(self) -> np.ndarray:
        return np.abs(self.dual_coef)

    def decision(self, X, chunk: int = 2048) -> np.ndarray:
        X = as_2d(X).astype(float)
        out = np.full(X.shape[0], self.bias)
        if len(self.dual_coef) == 0:
            return out
        for s in range(0, X.shape[0], chunk):
            out[s:s + chunk] += gram(self.kernel, X[s:s + chunk], self.support_vectors) @ self.dual_coef
        return out

    def to_dict(self):
        return {"support_vectors": self.support_vectors.tolist(), "dual_coef": self.dual_coef.tolist(),
                "bias": self.bias, "kernel": self.kernel.to_dict(), "c": self.c, "epochs": self.epochs,
                "converged": self.converged, "max_kkt_violation": self.max_kkt_violation,
                "support_index": self.support_index.tolist()}

    @classmethod
    def from_dict(cls, d):
        sv = np.asarray(d["support_vectors"], dtype=float)
        return cls(sv.reshape(-1, sv.shape[1] if sv.ndim == 2 else 0), np.asarray(d["dual_coef"], dtype=float),
                   float(d["bias"]), KernelSpec(**d["kernel"]), float(d["c"]), int(d["epochs"]),
                   bool(d["converged"]), float(d["max_kkt_violation"]), np.asarray(d["support_index"], dtype=np.int64))


def dual_objective(alphas, y, K) -> float:
    """``sum(alpha) - 0.5 * (alpha*y)^T K (alpha*y)``, the quantity SMO maximises."""
    ay = np.asarray(alphas) * np.asarray(y)
    return float(np.sum(alphas) - 0.5 * ay @ K @ ay)


def smo_fit(X, y, kernel: KernelSpec = KernelSpec(), c: float = 1.0, epoch_cap: int | None = 5,
            kkt_tol: float = 1e-3, seed: int = 0, cache_rows: int = 512, max_fallback: int = 256) -> SvmModel:
    """Train on the dual of the soft-margin problem.

    ``epoch_cap=None`` runs until a full epoch finds no KKT violation above
    ``kkt_tol``. When the first-choice partner of a violating example makes no
    progress, up to ``max_fallback`` further partners are tried, starting at
    a random offset.
    """
    X = as_2d(X).astype(float)
    y = np.asarray(y, dtype=float)
    if set(np.unique(y)) != {-1.0, 1.0}:
        raise DegenerateTrainingError("SMO needs both labels -1 and +1")
    if not c > 0:
        raise ValueError("penalty c must be positive")
    n = X.shape[0]
    rng = np.random.default_rng(seed)
    row = _RowCache(X, kernel, cache_rows)
    if kernel.kind is KernelKind.RBF:
        diag = np.ones(n)
    else:
        diag = np.array([gram(kernel, X[i:i + 1], X[i:i + 1])[0, 0] for i in range(n)])

    alpha = np.zeros(n)
    u = np.zeros(n)        # sum_j alpha_j y_j K_ij
    b = 0.0
    eps = 1e-12

    def err(i):
        return u[i] + b - y[i]

    def take_step(i1, i2, E2):
        nonlocal b
        if i1 == i2:
            return False
        a1, a2, y1, y2 = alpha[i1], alpha[i2], y[i1], y[i2]
        E1 = err(i1)
        s = y1 * y2
        if s < 0:
            L, H = max(0.0, a2 - a1), min(c, c + a2 - a1)
        else:
            L, H = max(0.0, a2 + a1 - c), min(c, a2 + a1)
        if H - L < eps:
            return False
        k11, k22 = diag[i1], diag[i2]
        k12 = row.entry(i1, i2)
        eta = k11 + k22 - 2.0 * k12
        if eta > eps:
            a2n = min(H, max(L, a2 + y2 * (E1 - E2) / eta))
        else:
            # non-positive curvature: move to whichever end has the better objective
            f1 = y1 * (E1 + y1) - a1 * k11 - s * a2 * k12
            f2 = y2 * (E2 + y2) - s * a1 * k12 - a2 * k22
            def obj(a2x):
                a1x = a1 + s * (a2 - a2x)
                return a1x * f1 + a2x * f2 + 0.5 * a1x * a1x * k11 + 0.5 * a2x * a2x * k22 + s * a2x * a1x * k12
            lo, hi = obj(L), obj(H)
            if lo < hi - 1e-12:
                a2n = L
            elif lo > hi + 1e-12:
                a2n = H
            else:
                a2n = a2
        if abs(a2n - a2) < 1e-10 * (a2n + a2 + 1e-10):
            return False
        a1n = a1 + s * (a2 - a2n)
        if a1n < 0:
            a2n += s * a1n
            a1n = 0.0
        elif a1n > c:
            a2n += s * (a1n - c)
            a1n = c
        # round-off can leave a multiplier a hair inside a bound; snap it so KKT checks see it as bound
        snap = 1e-12 * c
        a1n = 0.0 if a1n < snap else c if a1n > c - snap else a1n
        a2n = 0.0 if a2n < snap else c if a2n > c - snap else a2n
        d1, d2 = y1 * (a1n - a1), y2 * (a2n - a2)
        b1 = b - E1 - d1 * k11 - d2 * k12
        b2 = b - E2 - d1 * k12 - d2 * k22
        if 0 < a1n < c:
            b = b1
        elif 0 < a2n < c:
            b = b2
        else:
            b = 0.5 * (b1 + b2)
        u[:] += d1 * row(i1) + d2 * row(i2)
        alpha[i1], alpha[i2] = a1n, a2n
        return True

    def violation(i):
        r = (u[i] + b - y[i]) * y[i]   # y f - 1
        if alpha[i] < c and r < 0:
            return -r
        if alpha[i] > 0 and r > 0:
            return r
        return 0.0

    def examine(i2):
        if violation(i2) <= kkt_tol:
            return False
        E2 = err(i2)
        E = u + b - y
        free = np.flatnonzero((alpha > 0) & (alpha < c))
        if len(free) > 1:
            i1 = int(free[np.argmax(np.abs(E[free] - E2))])
            if take_step(i1, i2, E2):
                return True
        tried = 0
        for pool in (free, np.arange(n)):
            if len(pool) == 0:
                continue
            start = int(rng.integers(len(pool)))
            for j in range(len(pool)):
                if tried >= max_fallback:
                    return False
                i1 = int(pool[(start + j) % len(pool)])
                tried += 1
                if take_step(i1, i2, E2):
                    return True
        return False

    epochs = 0
    converged = False
    while epoch_cap is None or epochs < epoch_cap:
        changed = 0
        for i in range(n):
            changed += examine(i)
        epochs += 1
        if changed == 0:
            converged = True
            break

    # bias from free support vectors; otherwise the midpoint of the KKT-feasible interval
    free = (alpha > 1e-12) & (alpha < c - 1e-12)
    if free.any():
        b = float(np.mean(y[free] - u[free]))
    else:
        lower, upper = -np.inf, np.inf
        for i in range(n):
            bound = y[i] - u[i]
            at_zero = alpha[i] <= 1e-12
            if (y[i] > 0) == at_zero:
                lower = max(lower, bound)
            else:
                upper = min(upper, bound)
        if np.isfinite(lower) and np.isfinite(upper):
            b = 0.5 * (lower + upper)
        elif np.isfinite(lower):
            b = lower
        elif np.isfinite(upper):
            b = upper
    max_viol = max((violation(i) for i in range(n)), default=0.0)
    sv = np.flatnonzero(alpha > 1e-12)
    return SvmModel(X[sv].copy(), alpha[sv] * y[sv], float(b), kernel, float(c), epochs,
                    converged and max_viol <= kkt_tol, float(max_viol), sv)


def svm_decision(model: SvmModel, x) -> np.ndarray | float:
    out = model.decision(x)
    return float(out[0]) if np.ndim(x) == 1 else out


def svm_predict(model: SvmModel, x):
    """+1 where the decision value is strictly positive, else -1 (ham)."""
    d = model.decision(x)
    out = np.where(d > 0, 1, -1)
    return int(out[0]) if np.ndim(x) == 1 else out
