"""
Random forests and gradient-boosted trees
=========================================

Gini-split CART trees bagged into a forest, and second-order boosted trees
with the regularised split gain. Both run on the toy bag-of-words matrix.
"""
import numpy as np

from spamlab import build_dictionary, build_matrix, load_corpus, preprocess, toy_corpus_path
from spamlab.models.trees import gbt_fit, gbt_predict, gini_impurity, leaf_weight, rf_fit, rf_proba, split_gain

print("gini of [5, 5]:", gini_impurity([5, 5]), " gini of [10, 0]:", gini_impurity([10, 0]))
# gain of separating gradients perfectly, and the optimal leaf value for them
print("gain:", split_gain(-4.0, 2.0, 4.0, 2.0, lam=1.0, gamma=0.0), " leaf:", leaf_weight(-4.0, 2.0, lam=1.0))

corpus = load_corpus(toy_corpus_path())
streams = [preprocess(d) for d in corpus.documents]
m = build_matrix(streams, [int(d.label) for d in corpus.documents], build_dictionary(streams, 100))

forest = rf_fit(m.counts, m.labels, n_trees=50, seed=0)
print("forest: trees", forest.n_trees, "training accuracy", np.mean((rf_proba(forest, m.counts) > 0.5) == m.labels))

boost = gbt_fit(m.counts, m.labels, rounds=20)
print("boosting training accuracy", np.mean(gbt_predict(boost, m.counts) == m.labels))
