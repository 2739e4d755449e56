"""Exact k-nearest-neighbour search: brute force, ball tree and KD-tree.

Neighbours are ordered by ``(distance, stored index)``, so every algorithm
returns the same list, ties included. Both trees are built on median splits
until a node holds at most ``leaf_size`` points; queries run a depth-first
branch-and-bound that only discards nodes whose lower bound is strictly
larger than the current k-th distance.
"""
from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ._common import as_2d


class Algorithm(str, enum.Enum):
    BRUTE = "brute"
    BALL_TREE = "ball_tree"
    KD_TREE = "kd_tree"


@dataclass(frozen=True)
class KnnConfig:
    k: int = 5
    algorithm: Algorithm = Algorithm.BRUTE
    leaf_size: int = 10
    p: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.leaf_size < 1:
            raise ValueError("leaf_size must be >= 1")
        if self.p < 1:
            raise ValueError("Minkowski exponent p must be >= 1")


def minkowski(X, q, p: float) -> np.ndarray:
    """Distances from every row of ``X`` to ``q``."""
    diff = np.abs(np.asarray(X, dtype=float) - np.asarray(q, dtype=float))
    if p == 1:
        return diff.sum(axis=-1)
    if p == 2:
        return np.sqrt((diff * diff).sum(axis=-1))
    if np.isinf(p):
        return diff.max(axis=-1)
    return (diff ** p).sum(axis=-1) ** (1.0 / p)


@dataclass
class _Node:
    start: int
    end: int
    left: int = -1
    right: int = -1
    # ball tree
    centroid: np.ndarray | None = None
    radius: float = 0.0
    # kd tree
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left < 0


class NeighborIndex:
    def __init__(self, X, labels, cfg: KnnConfig):
        self.X = as_2d(X).astype(float)
        self.labels = np.asarray(labels)
        self.cfg = cfg
        self.order = np.arange(len(self.X))
        self.nodes: list[_Node] = []
        if cfg.algorithm is not Algorithm.BRUTE:
            self._build()

    def __len__(self) -> int:
        return len(self.X)

    def _make_node(self, start, end) -> int:
        pts = self.X[self.order[start:end]]
        node = _Node(start, end)
        if self.cfg.algorithm is Algorithm.BALL_TREE:
            node.centroid = pts.mean(axis=0)
            node.radius = float(minkowski(pts, node.centroid, self.cfg.p).max())
        else:
            node.lo, node.hi = pts.min(axis=0), pts.max(axis=0)
        self.nodes.append(node)
        return len(self.nodes) - 1

    def _build(self):
        stack = [(self._make_node(0, len(self.X)), 0)]
        while stack:
            nid, depth = stack.pop()
            node = self.nodes[nid]
            count = node.end - node.start
            if count <= self.cfg.leaf_size:
                continue
            idx = self.order[node.start:node.end]
            pts = self.X[idx]
            if self.cfg.algorithm is Algorithm.BALL_TREE:
                dim = int(np.argmax(pts.max(axis=0) - pts.min(axis=0)))
            else:
                dim = depth % self.X.shape[1]
            half = count // 2
            part = np.argpartition(pts[:, dim], half, kind="introselect")
            self.order[node.start:node.end] = idx[part]
            mid = node.start + half
            node.left = self._make_node(node.start, mid)
            node.right = self._make_node(mid, node.end)
            stack.append((node.right, depth + 1))
            stack.append((node.left, depth + 1))

    def leaves(self) -> list[np.ndarray]:
        if not self.nodes:
            return [self.order.copy()]
        return [self.order[n.start:n.end] for n in self.nodes if n.is_leaf]

    def _lower_bound(self, node: _Node, q) -> float:
        if self.cfg.algorithm is Algorithm.BALL_TREE:
            return max(0.0, float(minkowski(node.centroid[None, :], q, self.cfg.p)[0]) - node.radius)
        gap = np.maximum(node.lo - q, 0.0) + np.maximum(q - node.hi, 0.0)
        return float(minkowski(gap[None, :], np.zeros_like(gap), self.cfg.p)[0])

    def query(self, q, k: int) -> list[tuple[int, float]]:
        q = np.asarray(q, dtype=float)
        n = len(self.X)
        if k > n:
            raise ValueError(f"k={k} exceeds the {n} stored points")
        if k < 1:
            raise ValueError("k must be >= 1")
        if not self.nodes:
            d = minkowski(self.X, q, self.cfg.p)
            top = np.lexsort((np.arange(n), d))[:k]
            return [(int(i), float(d[i])) for i in top]

        heap: list[tuple[float, int]] = []   # max-heap on (dist, id) via negation

        def kth():
            return (-heap[0][0], -heap[0][1]) if len(heap) == k else (np.inf, np.inf)

        stack = [(self._lower_bound(self.nodes[0], q), 0)]
        while stack:
            bound, nid = stack.pop()
            # the bounds carry rounding error; only prune clearly farther nodes so
            # points tied with the k-th distance are never lost
            if bound > kth()[0] * (1.0 + 1e-9) + 1e-12:
                continue
            node = self.nodes[nid]
            if node.is_leaf:
                idx = self.order[node.start:node.end]
                dist = minkowski(self.X[idx], q, self.cfg.p)
                for i, d in zip(idx.tolist(), dist.tolist()):
                    if len(heap) < k:
                        heapq.heappush(heap, (-d, -i))
                    elif (d, i) < kth():
                        heapq.heapreplace(heap, (-d, -i))
                continue
            children = [(self._lower_bound(self.nodes[c], q), c) for c in (node.left, node.right)]
            children.sort(key=lambda t: t[0], reverse=True)   # nearer child popped first
            stack.extend(children)
        found = sorted((-nd, -ni) for nd, ni in heap)
        return [(int(i), float(d)) for d, i in found]


def build_index(X, labels=None, cfg: KnnConfig = KnnConfig()) -> NeighborIndex:
    X = as_2d(X)
    if X.shape[0] == 0:
        raise ValueError("cannot build a neighbour index on an empty matrix")
    if labels is None:
        labels = np.zeros(X.shape[0], dtype=np.int64)
    return NeighborIndex(X, labels, cfg)


def knn_query(index: NeighborIndex, x, k: int) -> list[tuple[int, float]]:
    return index.query(x, k)


def _vote(labels, dists) -> tuple[int, float]:
    spam = labels == 1
    frac = float(spam.mean())
    if frac > 0.5:
        return 1, frac
    if frac < 0.5:
        return 0, frac
    d_spam, d_ham = float(dists[spam].sum()), float(dists[~spam].sum())
    if d_spam < d_ham:
        return 1, frac + 1e-9
    return 0, frac - 1e-9


def knn_predict(index: NeighborIndex, x, cfg: KnnConfig | None = None) -> int:
    """Majority label among the k nearest; ties go to the class with the
    smaller summed distance, then to ham."""
    cfg = cfg or index.cfg
    nb = index.query(x, cfg.k)
    ids = np.array([i for i, _ in nb])
    d = np.array([dd for _, dd in nb])
    return _vote(index.labels[ids], d)[0]


@dataclass
class KnnModel:
    X: np.ndarray
    labels: np.ndarray
    cfg: KnnConfig

    def __post_init__(self):
        self._index = build_index(self.X, self.labels, self.cfg)

    @property
    def index(self) -> NeighborIndex:
        return self._index

    def _neighbours_brute(self, Q, chunk=256):
        """Yield ``(ids, distances)`` blocks of shape ``(rows, k)`` in ``(distance, id)`` order."""
        n, k = len(self.X), self.cfg.k
        metric = "cityblock" if self.cfg.p == 1 else ("euclidean" if self.cfg.p == 2 else "minkowski")
        kw = {"p": self.cfg.p} if metric == "minkowski" else {}
        for s in range(0, len(Q), chunk):
            D = cdist(Q[s:s + chunk], self.X, metric=metric, **kw)
            r = np.arange(len(D))[:, None]
            part = np.argpartition(D, k - 1, axis=1)[:, :k] if k < n else np.tile(np.arange(n), (len(D), 1))
            kth = D[r, part].max(axis=1)
            top = part.copy()
            # rows where points beyond the partition tie with the k-th distance need the id tie-break
            for i in np.flatnonzero((D <= kth[:, None]).sum(axis=1) > k):
                cand = np.flatnonzero(D[i] <= kth[i])
                top[i] = cand[np.lexsort((cand, D[i, cand]))][:k]
            d = D[r, top]
            order = np.lexsort((top, d), axis=1)
            top = top[r, order]
            yield top, D[r, top]

    def decision(self, X) -> np.ndarray:
        """Spam fraction among the k nearest neighbours.

        On an exact vote tie the score is nudged by 1e-9 towards the class
        chosen by the tie rule, keeping ``score > 0.5`` equivalent to the
        predicted label.
        """
        Q = as_2d(X).astype(float)
        out = np.empty(len(Q))
        if self.cfg.algorithm is Algorithm.BRUTE:
            r = 0
            for ids, d in self._neighbours_brute(Q):
                out[r:r + len(ids)] = [_vote(self.labels[i], dd)[1] for i, dd in zip(ids, d)]
                r += len(ids)
        else:
            for r, q in enumerate(Q):
                nb = self._index.query(q, self.cfg.k)
                ids = np.array([i for i, _ in nb])
                out[r] = _vote(self.labels[ids], np.array([d for _, d in nb]))[1]
        return out

    def to_dict(self):
        return {"X": self.X.tolist(), "labels": self.labels.tolist(),
                "cfg": {"k": self.cfg.k, "algorithm": self.cfg.algorithm.value,
                        "leaf_size": self.cfg.leaf_size, "p": self.cfg.p}}

    @classmethod
    def from_dict(cls, d):
        X = np.asarray(d["X"], dtype=float)
        return cls(X, np.asarray(d["labels"], dtype=np.int64), KnnConfig(**d["cfg"]))
