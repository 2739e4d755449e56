"""
Exact nearest neighbours with brute force, KD and ball trees
============================================================

All three indices return the same neighbours. The trees only save
distance evaluations.
"""
import time

import numpy as np

from spamlab.models.neighbors import Algorithm, KnnConfig, KnnModel, build_index, knn_query

r = np.random.default_rng(0)
X = r.poisson(1.0, size=(3000, 6)).astype(float)
y = (X[:, 0] > X[:, 1]).astype(int)
q = r.poisson(1.0, size=6).astype(float)

for algorithm in Algorithm:
    idx = build_index(X, cfg=KnnConfig(5, algorithm, 30, 1))
    t0 = time.perf_counter()
    hits = knn_query(idx, q, 5)
    print(f"{algorithm.value:10s} {[i for i, _ in hits]}  {1e3 * (time.perf_counter() - t0):.2f} ms")

# the model score is the fraction of spam among the k neighbours
model = KnnModel(X, y, KnnConfig(5, Algorithm.KD_TREE, 30, 1))
print("spam fraction for first rows:", model.decision(X[:5]))
