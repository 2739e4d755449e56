"""Random forest with Gini splits and second-order gradient-boosted trees.

Split search is exact. Each feature's distinct training values are coded
once; at a node the per-value sums (counts for the forest, gradient and
hessian sums for boosting) are accumulated, prefix-summed, and every
boundary between consecutive distinct values present in the node is scored.
Thresholds are midpoints between those values and rows go left when
``value <= threshold``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._common import as_2d
from .._rng import derive_seed, make_rng


def gini_impurity(class_counts) -> float:
    counts = np.asarray(class_counts, dtype=float)
    if np.any(counts < 0):
        raise ValueError("class counts must be non-negative")
    total = counts.sum()
    if total <= 0:
        raise ValueError("gini impurity of an empty node is undefined")
    p = counts / total
    return float(1.0 - np.sum(p * p))


class _Coder:
    """Integer codes for each feature's sorted distinct values."""

    def __init__(self, X):
        X = np.asarray(X, dtype=float)
        self.values = []
        codes = np.empty(X.shape, dtype=np.int64)
        for j in range(X.shape[1]):
            uniq, inv = np.unique(X[:, j], return_inverse=True)
            self.values.append(uniq)
            codes[:, j] = inv
        self.codes = codes
        self.nuniq = np.array([len(v) for v in self.values], dtype=np.int64)

    def prefix_sums(self, rows, feats, stats):
        """Per-(feature, present value) cumulative sums of ``stats`` over ``rows``.

        Returns ``(feat_of_bin, code_of_bin, cum, last)`` where bins are ordered
        feature-major then by ascending value, ``cum[s]`` is the left-side sum
        of statistic ``s`` when splitting right after that bin, and ``last``
        marks the final present bin of each feature (not a valid split).
        """
        nu = self.nuniq[feats]
        offsets = np.concatenate([[0], np.cumsum(nu)[:-1]])
        total = int(nu.sum())
        flat = (self.codes[np.ix_(rows, feats)] + offsets).ravel()
        m, f = len(rows), len(feats)
        if m * f >= total:
            counts = np.bincount(flat, minlength=total)
            present = np.flatnonzero(counts)
            sums = [np.bincount(flat, weights=np.repeat(s, f), minlength=total)[present] for s in stats]
            bins = present
        else:
            bins, inv = np.unique(flat, return_inverse=True)
            sums = [np.bincount(inv, weights=np.repeat(s, f)) for s in stats]
        seg = np.searchsorted(offsets, bins, side="right") - 1
        starts = np.flatnonzero(np.r_[True, seg[1:] != seg[:-1]])
        cum = []
        for s in sums:
            c = np.cumsum(s)
            base = np.r_[0.0, c[starts[1:] - 1]] if len(starts) > 1 else np.array([0.0])
            cum.append(c - np.repeat(base, np.diff(np.r_[starts, len(bins)])))
        last = np.zeros(len(bins), dtype=bool)
        last[np.r_[starts[1:] - 1, len(bins) - 1]] = True
        return seg, bins - offsets[seg], cum, last

    def threshold(self, feat, code, rows) -> float:
        col = self.codes[rows, feat]
        nxt = col[col > code].min()
        v = self.values[feat]
        return 0.5 * (v[code] + v[nxt])


@dataclass
class DecisionTree:
    """Flat node arrays; ``feature < 0`` marks a leaf."""

    feature: list = field(default_factory=list)
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    value: list = field(default_factory=list)

    def add(self, value) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.feature) - 1

    def set_split(self, node, feat, thr, left, right):
        self.feature[node], self.threshold[node] = int(feat), float(thr)
        self.left[node], self.right[node] = left, right

    def __len__(self) -> int:
        return len(self.feature)

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by each row."""
        X = as_2d(X)
        feat = np.asarray(self.feature)
        thr = np.asarray(self.threshold)
        left, right = np.asarray(self.left), np.asarray(self.right)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(feat[node] >= 0)
        while active.size:
            nd = node[active]
            go_left = X[active, feat[nd]] <= thr[nd]
            node[active] = np.where(go_left, left[nd], right[nd])
            active = active[feat[node[active]] >= 0]
        return node

    def depth(self) -> int:
        best, stack = 0, [(0, 0)]
        while stack:
            n, d = stack.pop()
            best = max(best, d)
            if self.feature[n] >= 0:
                stack += [(self.left[n], d + 1), (self.right[n], d + 1)]
        return best

    def to_dict(self):
        return {"feature": list(map(int, self.feature)), "threshold": list(map(float, self.threshold)),
                "left": list(map(int, self.left)), "right": list(map(int, self.right)),
                "value": [v if isinstance(v, (int, float)) else list(v) for v in self.value]}

    @classmethod
    def from_dict(cls, d):
        return cls(list(d["feature"]), list(d["threshold"]), list(d["left"]), list(d["right"]), list(d["value"]))


# -- random forest -----------------------------------------------------------

def best_gini_split(coder: _Coder, rows, feats, y):
    """Best ``(feature, code, decrease)`` over ``feats`` at a node, or None.

    Among equal maxima the choice does not depend on the order of the
    columns, which keeps forest training invariant to column permutation.
    """
    m = len(rows)
    ys = y[rows].astype(float)
    seg, code, (n_left, s_left), last = coder.prefix_sums(rows, feats, [np.ones(m), ys])
    valid = ~last
    if not valid.any():
        return None
    spam = ys.sum()
    n_right, s_right = m - n_left, spam - s_left
    with np.errstate(divide="ignore", invalid="ignore"):
        g_left = 2.0 * (s_left / n_left) * (1.0 - s_left / n_left)
        g_right = 2.0 * (s_right / n_right) * (1.0 - s_right / n_right)
    parent = 2.0 * (spam / m) * (1.0 - spam / m)
    decrease = parent - (n_left * g_left + n_right * g_right) / m
    decrease[~valid] = -np.inf
    best = decrease.max()
    tied = np.flatnonzero(decrease >= best - 1e-12 * max(1.0, abs(best)))
    b = int(tied[0]) if len(tied) == 1 else _break_tie(coder, rows, feats, seg, code, tied)
    return int(feats[seg[b]]), int(code[b]), float(decrease[b])


def _break_tie(coder: _Coder, rows, feats, seg, code, tied) -> int:
    """Pick among equally good splits without reference to column order.

    The smallest left-membership pattern over the node's rows wins; splits
    giving the same partition are ordered by the full training column, so
    duplicated columns are the only remaining tie and they predict alike.
    """
    def pattern(b):
        return (coder.codes[rows, feats[seg[b]]] <= code[b]).tobytes()

    pats = {int(b): pattern(b) for b in tied}
    low = min(pats.values())
    cands = [b for b, p in pats.items() if p == low]
    if len(cands) == 1:
        return cands[0]
    return min(cands, key=lambda b: coder.values[feats[seg[b]]][coder.codes[:, feats[seg[b]]]].tobytes())


def grow_gini_tree(coder: _Coder, y, rows, rng, max_features: int | None, min_split: int = 2,
                   max_depth: int | None = None) -> DecisionTree:
    """Grow until nodes are pure, smaller than ``min_split`` or unsplittable.

    Leaves store ``[ham_count, spam_count]``.
    """
    tree = DecisionTree()
    n_feat = coder.codes.shape[1]
    root = tree.add(None)
    stack = [(root, np.asarray(rows), 0)]
    while stack:
        node, idx, depth = stack.pop()
        spam = int(y[idx].sum())
        tree.value[node] = [len(idx) - spam, spam]
        if spam == 0 or spam == len(idx) or len(idx) < min_split or (max_depth is not None and depth >= max_depth):
            continue
        if max_features is None or max_features >= n_feat:
            order = np.arange(n_feat)
            first = order
        else:
            order = rng.permutation(n_feat)
            first = order[:max_features]
        found = best_gini_split(coder, idx, first, y)
        if found is None and len(first) < n_feat:
            # every sampled feature is constant here; keep drawing from the rest
            found = best_gini_split(coder, idx, order[len(first):], y)
        if found is None:
            continue
        feat, code, _ = found
        thr = coder.threshold(feat, code, idx)
        go_left = coder.codes[idx, feat] <= code
        li, ri = tree.add(None), tree.add(None)
        tree.set_split(node, feat, thr, li, ri)
        stack.append((ri, idx[~go_left], depth + 1))
        stack.append((li, idx[go_left], depth + 1))
    return tree


def tree_votes(tree: DecisionTree, X) -> np.ndarray:
    """1 where the reached leaf has a strict spam majority, else 0."""
    leaves = tree.apply(X)
    vals = np.asarray(tree.value, dtype=float)
    return (vals[leaves, 1] > vals[leaves, 0]).astype(np.int64)


@dataclass
class ForestModel:
    trees: list
    tree_seeds: list
    max_features: int | None
    min_split: int = 2

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def decision(self, X) -> np.ndarray:
        """Fraction of trees voting spam."""
        X = as_2d(X)
        votes = np.zeros(X.shape[0])
        for t in self.trees:
            votes += tree_votes(t, X)
        return votes / len(self.trees)

    def to_dict(self):
        return {"trees": [t.to_dict() for t in self.trees], "tree_seeds": list(self.tree_seeds),
                "max_features": self.max_features, "min_split": self.min_split}

    @classmethod
    def from_dict(cls, d):
        return cls([DecisionTree.from_dict(t) for t in d["trees"]], list(d["tree_seeds"]),
                   d["max_features"], int(d["min_split"]))


def resolve_max_features(rule, n_features: int) -> int | None:
    if rule is None or rule == "all":
        return None
    if rule == "sqrt":
        return max(1, math.ceil(math.sqrt(n_features)))
    return int(rule)


def rf_fit(X, y, n_trees: int = 50, min_split: int = 2, seed: int = 0, max_features="sqrt",
           bootstrap: bool = True, max_depth: int | None = None) -> ForestModel:
    X = as_2d(X)
    y = np.asarray(y, dtype=np.int64)
    coder = _Coder(X)
    mf = resolve_max_features(max_features, X.shape[1])
    trees, seeds = [], []
    n = X.shape[0]
    for t in range(n_trees):
        ts = derive_seed(seed, "tree", t)
        rng = make_rng(ts)
        rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        trees.append(grow_gini_tree(coder, y, rows, rng, mf, min_split, max_depth))
        seeds.append(ts)
    return ForestModel(trees, seeds, mf, min_split)


def rf_proba(model: ForestModel, x):
    p = model.decision(x)
    return float(p[0]) if np.ndim(x) == 1 else p


def rf_predict(model: ForestModel, x):
    """Majority vote; an exact tie goes to ham."""
    out = (model.decision(x) > 0.5).astype(np.int64)
    return int(out[0]) if np.ndim(x) == 1 else out


# -- gradient boosting -------------------------------------------------------

def split_gain(G_L, H_L, G_R, H_R, lam, gamma):
    """``0.5 * [G_L^2/(H_L+lam) + G_R^2/(H_R+lam) - G^2/(H+lam)] - gamma``."""
    G, H = G_L + G_R, H_L + H_R
    return 0.5 * (G_L ** 2 / (H_L + lam) + G_R ** 2 / (H_R + lam) - G ** 2 / (H + lam)) - gamma


def leaf_weight(G, H, lam):
    return -G / (H + lam)


def grow_boost_tree(coder: _Coder, g, h, lam, gamma, max_depth, min_child_weight) -> DecisionTree:
    tree = DecisionTree()
    root = tree.add(0.0)
    stack = [(root, np.arange(coder.codes.shape[0]), 0)]
    feats = np.arange(coder.codes.shape[1])
    while stack:
        node, idx, depth = stack.pop()
        G, H = float(g[idx].sum()), float(h[idx].sum())
        tree.value[node] = float(leaf_weight(G, H, lam))
        if depth >= max_depth or len(idx) < 2:
            continue
        seg, code, (G_L, H_L), last = coder.prefix_sums(idx, feats, [g[idx], h[idx]])
        G_R, H_R = G - G_L, H - H_L
        gain = split_gain(G_L, H_L, G_R, H_R, lam, gamma)
        gain[last | (H_L < min_child_weight) | (H_R < min_child_weight)] = -np.inf
        if gain.size == 0:
            continue
        b = int(np.argmax(gain))
        if not gain[b] > 0:
            continue
        feat, c = int(feats[seg[b]]), int(code[b])
        thr = coder.threshold(feat, c, idx)
        go_left = coder.codes[idx, feat] <= c
        li, ri = tree.add(0.0), tree.add(0.0)
        tree.set_split(node, feat, thr, li, ri)
        stack.append((ri, idx[~go_left], depth + 1))
        stack.append((li, idx[go_left], depth + 1))
    return tree


def tree_output(tree: DecisionTree, X) -> np.ndarray:
    return np.asarray(tree.value, dtype=float)[tree.apply(X)]


def logistic_loss(margin, y) -> float:
    return float(np.mean(np.logaddexp(0.0, margin) - y * margin))


@dataclass
class BoostModel:
    trees: list
    eta: float
    lam: float
    gamma: float
    base_score: float = 0.0
    train_loss: list = field(default_factory=list)

    def decision(self, X) -> np.ndarray:
        """Raw margin ``base + eta * sum(tree outputs)``."""
        X = as_2d(X)
        out = np.full(X.shape[0], self.base_score)
        for t in self.trees:
            out += self.eta * tree_output(t, X)
        return out

    def to_dict(self):
        return {"trees": [t.to_dict() for t in self.trees], "eta": self.eta, "lambda": self.lam,
                "gamma": self.gamma, "base_score": self.base_score}

    @classmethod
    def from_dict(cls, d):
        return cls([DecisionTree.from_dict(t) for t in d["trees"]], float(d["eta"]), float(d["lambda"]),
                   float(d["gamma"]), float(d["base_score"]))


def gbt_fit(X, y, rounds: int = 100, eta: float = 0.3, lam: float = 1.0, gamma: float = 0.0,
            max_depth: int = 6, min_child_weight: float = 1.0, base_score: float = 0.0) -> BoostModel:
    """Boosting on the logistic loss with Newton leaf weights ``-G / (H + lambda)``."""
    X = as_2d(X)
    y = np.asarray(y, dtype=float)
    coder = _Coder(X)
    margin = np.full(X.shape[0], float(base_score))
    trees, losses = [], [logistic_loss(margin, y)]
    for _ in range(rounds):
        p = 1.0 / (1.0 + np.exp(-margin))
        g, h = p - y, p * (1.0 - p)
        tree = grow_boost_tree(coder, g, h, lam, gamma, max_depth, min_child_weight)
        trees.append(tree)
        margin = margin + eta * tree_output(tree, X)
        losses.append(logistic_loss(margin, y))
    return BoostModel(trees, eta, lam, gamma, float(base_score), losses)


def gbt_predict(model: BoostModel, x):
    """Spam where the margin is strictly positive."""
    out = (model.decision(x) > 0).astype(np.int64)
    return int(out[0]) if np.ndim(x) == 1 else out
