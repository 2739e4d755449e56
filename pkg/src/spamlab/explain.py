"""Shapley feature attributions for any scoring function.

The value of a coalition ``S`` at instance ``x`` is the mean model score
over hybrid rows that take the features in ``S`` from ``x`` and the rest
from each background row. ``shapley_exact`` enumerates all ``2^N``
coalitions; ``shapley_sample`` averages marginal contributions along random
feature orderings.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._rng import make_rng
from .errors import FeasibilityError
from .models.core import TrainedModel, decision_scores

MAX_EXACT_FEATURES = 12

ScoreFn = Callable[[np.ndarray], np.ndarray]


def score_function(model) -> ScoreFn:
    """Wrap a TrainedModel (or any ``X -> scores`` callable) as a score function."""
    if isinstance(model, TrainedModel):
        return lambda X: decision_scores(model, X)
    if callable(model):
        return lambda X: np.asarray(model(X), dtype=float)
    raise TypeError(f"cannot score with {type(model).__name__}")


def make_background(X, size: int = 100, seed: int = 0) -> np.ndarray:
    """Up to ``size`` distinct rows of ``X`` drawn without replacement, in draw order."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("background source must be a nonempty 2-D matrix")
    if X.shape[0] <= size:
        return X.copy()
    idx = make_rng(seed).choice(X.shape[0], size=size, replace=False)
    return X[idx]


def _hybrids(x, masks, background) -> np.ndarray:
    # (n_masks * n_background, n_features): mask rows pick x, others pick background
    m = masks[:, None, :]
    return np.where(m, x[None, None, :], background[None, :, :]).reshape(-1, len(x))


def _coalition_values(f: ScoreFn, x, masks, background, chunk_rows: int = 200_000) -> np.ndarray:
    B = len(background)
    per = max(1, chunk_rows // B)
    out = np.empty(len(masks))
    for s in range(0, len(masks), per):
        mk = masks[s:s + per]
        out[s:s + len(mk)] = np.asarray(f(_hybrids(x, mk, background)), dtype=float).reshape(len(mk), B).mean(axis=1)
    return out


def value_function(model, x, subset, background) -> float:
    x = np.asarray(x, dtype=float)
    bg = np.atleast_2d(np.asarray(background, dtype=float))
    if len(bg) == 0:
        raise ValueError("background must be nonempty")
    mask = np.zeros(len(x), dtype=bool)
    mask[list(subset)] = True
    return float(_coalition_values(score_function(model), x, mask[None, :], bg)[0])


@dataclass(frozen=True)
class AttributionSet:
    instance_id: str
    values: np.ndarray            # one attribution per feature
    base_value: float             # mean score over the background
    score: float                  # model score at the instance
    feature_values: np.ndarray    # the instance's own feature values (word counts)

    @property
    def residual(self) -> float:
        """``score - base - sum(values)``; zero up to rounding when efficiency holds."""
        return float(self.score - self.base_value - np.sum(self.values))


def shapley_exact(model, x, background, instance_id: str = "") -> AttributionSet:
    x = np.asarray(x, dtype=float)
    bg = np.atleast_2d(np.asarray(background, dtype=float))
    n = len(x)
    if n > MAX_EXACT_FEATURES:
        raise FeasibilityError(f"exact enumeration over {n} features is infeasible "
                               f"(limit {MAX_EXACT_FEATURES}); use shapley_sample")
    f = score_function(model)
    codes = np.arange(1 << n)
    masks = ((codes[:, None] >> np.arange(n)) & 1).astype(bool)
    v = _coalition_values(f, x, masks, bg)
    sizes = masks.sum(axis=1)
    # weight of a coalition S not containing i: |S|! (n - |S| - 1)! / n!
    w = np.array([math.factorial(k) * math.factorial(n - k - 1) / math.factorial(n) if k < n else 0.0
                  for k in range(n + 1)])
    phi = np.zeros(n)
    for i in range(n):
        without = codes[(codes >> i) & 1 == 0]
        phi[i] = np.sum(w[sizes[without]] * (v[without | (1 << i)] - v[without]))
    return AttributionSet(instance_id, phi, float(v[0]), float(v[-1]), x.copy())


def _antithetic_permutations(n: int, count: int, rng) -> np.ndarray:
    """``count`` permutations drawn in pairs ``(p, reversed p)``.

    Each member is marginally uniform, so estimates stay unbiased, while the
    pairing puts every feature early in one member and late in the other,
    which cancels much of the coalition-size variance.
    """
    out = np.empty((count, n), dtype=np.int64)
    for k in range(0, count, 2):
        p = rng.permutation(n)
        out[k] = p
        if k + 1 < count:
            out[k + 1] = p[::-1]
    return out


def shapley_sample(model, x, background, n_permutations: int = 100, seed: int = 0, adjust: bool = True,
                   instance_id: str = "", block: int = 256) -> AttributionSet:
    """Permutation-sampling estimate.

    Permutations come in antithetic pairs and are scored ``block`` at a time.
    With ``adjust`` the leftover ``score - base - sum(phi)`` is spread over the
    features in proportion to ``|phi_i|`` (evenly if all are zero). Each
    permutation telescopes, so the leftover is only floating-point noise.
    """
    if n_permutations < 1:
        raise ValueError("n_permutations must be >= 1")
    x = np.asarray(x, dtype=float)
    bg = np.atleast_2d(np.asarray(background, dtype=float))
    n = len(x)
    f = score_function(model)
    perms = _antithetic_permutations(n, n_permutations, make_rng(seed))
    # step j switches on the first j positions of a permutation; transposed for fancy assignment
    steps_t = np.tril(np.ones((n + 1, n), dtype=bool), -1).T
    phi = np.zeros(n)
    base = score = None
    for s in range(0, n_permutations, block):
        P = perms[s:s + block]
        masks = np.zeros((len(P), n + 1, n), dtype=bool)
        masks[np.arange(len(P))[:, None], :, P] = steps_t
        v = _coalition_values(f, x, masks.reshape(-1, n), bg).reshape(len(P), n + 1)
        np.add.at(phi, P, np.diff(v, axis=1))
        if base is None:
            base, score = float(v[0, 0]), float(v[0, -1])
    phi /= n_permutations
    if adjust:
        resid = score - base - phi.sum()
        weight = np.abs(phi)
        total = weight.sum()
        phi = phi + (resid * weight / total if total > 0 else resid / n)
    return AttributionSet(instance_id, phi, base, score, x.copy())


@dataclass(frozen=True)
class RankedFeature:
    feature: str
    index: int
    mean_abs: float
    points: tuple[tuple[float, float], ...]   # per instance: (attribution, feature count)


def summary_ranking(sets: Sequence[AttributionSet], feature_names: Sequence[str] | None = None,
                    top_k: int = 10) -> list[RankedFeature]:
    """Features ranked by mean absolute attribution; ties keep feature order.

    Features whose attributions are all exactly zero are never ranked.
    """
    if not sets:
        raise ValueError("need at least one attribution set")
    A = np.array([s.values for s in sets])
    V = np.array([s.feature_values for s in sets])
    names = list(feature_names) if feature_names is not None else [f"f{i}" for i in range(A.shape[1])]
    mean_abs = np.abs(A).mean(axis=0)
    order = [int(i) for i in np.argsort(-mean_abs, kind="stable") if mean_abs[i] > 0][:top_k]
    return [RankedFeature(names[i], i, float(mean_abs[i]),
                          tuple((float(a), float(v)) for a, v in zip(A[:, i], V[:, i]))) for i in order]


def attributions_to_csv(sets: Sequence[AttributionSet], feature_names: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance", "feature", "value", "feature_count"])
    for s in sets:
        for name, a, v in zip(feature_names, s.values, s.feature_values):
            w.writerow([s.instance_id, name, repr(float(a)), repr(float(v))])
    return buf.getvalue()


def attributions_from_csv(text: str) -> tuple[list[AttributionSet], list[str]]:
    """Inverse of ``attributions_to_csv`` (base value and score are not stored and come back as NaN)."""
    rows: dict[str, list[tuple[str, float, float]]] = {}
    for r in csv.DictReader(io.StringIO(text)):
        rows.setdefault(r["instance"], []).append((r["feature"], float(r["value"]), float(r["feature_count"])))
    names: list[str] = []
    sets = []
    for inst, items in rows.items():
        names = [it[0] for it in items]
        sets.append(AttributionSet(inst, np.array([it[1] for it in items]), math.nan, math.nan,
                                   np.array([it[2] for it in items])))
    return sets, names


def summary_to_csv(ranking: Sequence[RankedFeature]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank", "feature", "mean_abs", "attribution", "feature_count"])
    for r, feat in enumerate(ranking, 1):
        for a, v in feat.points:
            w.writerow([r, feat.feature, repr(feat.mean_abs), repr(a), repr(v)])
    return buf.getvalue()
