"""
Shapley attributions for a trained classifier
=============================================

Exact enumeration on a few features and the permutation estimator, then a
summary ranking of which words push documents towards spam.
"""
import numpy as np

from spamlab import ClassifierSpec, build_dictionary, build_matrix, fit, load_corpus, preprocess, toy_corpus_path
from spamlab.explain import make_background, shapley_exact, shapley_sample, summary_ranking

r = np.random.default_rng(0)
X = r.poisson(1.0, size=(200, 8)).astype(float)
y = (X[:, 0] + 2 * X[:, 1] - X[:, 2] > 1.5).astype(int)
model = fit(ClassifierSpec("logreg"), X, y)
bg = make_background(X, 20, seed=1)
exact = shapley_exact(model, X[0], bg)
approx = shapley_sample(model, X[0], bg, n_permutations=500, seed=0)
print("exact  :", np.round(exact.values, 3))
print("sampled:", np.round(approx.values, 3))
print("base + sum(phi) = score:", round(exact.base_value + exact.values.sum(), 6), round(exact.score, 6))

corpus = load_corpus(toy_corpus_path())
streams = [preprocess(d) for d in corpus.documents]
m = build_matrix(streams, [int(d.label) for d in corpus.documents], build_dictionary(streams, 50))
forest = fit(ClassifierSpec("rf", seed=0), m)
bg = make_background(m.counts, 10, seed=0)
sets = [shapley_sample(forest, m.counts[i], bg, n_permutations=10, seed=i, instance_id=m.rows[i])
        for i in range(0, len(m.rows), 4)]
for rank in summary_ranking(sets, list(m.words), top_k=5):
    print(f"  {rank.feature:12s} mean |phi| {rank.mean_abs:.3f}")
