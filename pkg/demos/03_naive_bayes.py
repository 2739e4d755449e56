"""
Three naive Bayes event models
==============================

Multinomial counts, Bernoulli presence and Gaussian densities fitted to the
same toy matrix. Scores are log-odds of spam, so 0 is the decision line.
"""
import numpy as np

from spamlab import build_dictionary, build_matrix, load_corpus, preprocess, toy_corpus_path
from spamlab.models.naive_bayes import bnb_fit, gnb_fit, log_odds, log_posterior, mnb_fit

corpus = load_corpus(toy_corpus_path())
streams = [preprocess(d) for d in corpus.documents]
m = build_matrix(streams, [int(d.label) for d in corpus.documents], build_dictionary(streams, 100))

for name, fitter in (("multinomial", mnb_fit), ("bernoulli", bnb_fit), ("gaussian", gnb_fit)):
    model = fitter(m.counts, m.labels)
    odds = log_odds(model, m.counts)
    acc = np.mean((odds > 0) == (m.labels == 1))
    # Gaussian densities on sparse counts are very peaked, so its log-odds run to huge magnitudes
    print(f"{name:12s} training accuracy {acc:.2f}; median |log-odds| {np.median(np.abs(odds)):.3g}")

# posteriors are normalised in log space, so each row sums to one
print("posterior of doc 0:", np.exp(log_posterior(mnb_fit(m.counts, m.labels), m.counts[:1]))[0])
