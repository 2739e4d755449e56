"""
Metrics, ROC curves and cross-validation
========================================

Precision, recall and F-score from a confusion matrix, an ROC curve with
its trapezoid AUC, then 5-fold cross-validation of two models.
"""
import numpy as np

from spamlab import ClassifierSpec, load_corpus, preprocess, split, toy_corpus_path
from spamlab.evaluation import confusion, cross_validate, fold_matrices, fscore, precision, recall, roc_curve

c = confusion([1, 1, 1, 0, 0, 0, 1, 0], [1, 0, 1, 0, 1, 0, 1, 0])
print(c, "precision", precision(c), "recall", recall(c), "F", round(fscore(c), 3))

r = np.random.default_rng(0)
labels = r.integers(0, 2, size=200)
scores = labels + r.normal(scale=0.8, size=200)
print("ROC AUC of noisy scores:", round(roc_curve(scores, labels).auc, 3))

corpus = load_corpus(toy_corpus_path())
plan = split(corpus, 0.7, 5, seed=0)
streams = {d.id: preprocess(d) for d in corpus.documents}
mats = fold_matrices(streams, {d.id: int(d.label) for d in corpus.documents}, plan, 200)
for kind in ("bnb", "logreg"):
    rep = cross_validate(ClassifierSpec(kind), plan, mats, timed=False)
    print(f"{rep.model:20s} F {rep.mean('fscore'):.3f} +- {rep.std('fscore'):.3f}  AUC {rep.mean('auc'):.3f}")
