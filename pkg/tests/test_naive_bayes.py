import math

import numpy as np
import pytest

from oracles import bnb_exact_log_posterior, gaussian_log_density, mnb_exact_log_posterior
from spamlab.models.naive_bayes import (bnb_fit, bnb_score, gnb_fit, gnb_score, log_odds, log_posterior, mnb_fit,
                                        mnb_score)


def test_mnb_add_one_example():
    # dictionary (free, money, project, meeting); one spam doc "free money"
    X = np.array([[1, 1, 0, 0], [0, 0, 1, 1]])
    m = mnb_fit(X, [1, 0])
    assert math.exp(m.word_log_probs[1, 0]) == pytest.approx(1 / 3, abs=1e-15)
    assert math.exp(m.word_log_probs[1, 2]) == pytest.approx(1 / 6, abs=1e-15)
    assert np.allclose(np.exp(m.log_priors), [0.5, 0.5])
    assert np.allclose(np.exp(m.word_log_probs).sum(axis=1), 1.0, atol=1e-9)


def test_mnb_zero_vector_gives_priors():
    X = np.array([[2, 0], [0, 1], [1, 1]])
    m = mnb_fit(X, [1, 0, 0])
    assert np.allclose(mnb_score(m, np.zeros(2)), m.log_priors)
    assert int(np.argmax(mnb_score(m, np.zeros(2)))) == 0


def test_mnb_linear_in_counts():
    m = mnb_fit(np.array([[3, 1, 0], [0, 2, 2]]), [1, 0])
    x = np.array([1, 2, 1])
    assert np.allclose(mnb_score(m, 2 * x) - m.log_priors, 2 * (mnb_score(m, x) - m.log_priors))


def _small_corpora(seed, n_cases):
    r = np.random.default_rng(seed)
    for _ in range(n_cases):
        n_docs = int(r.integers(2, 7))
        n_words = int(r.integers(2, 6))
        X = r.integers(0, 4, size=(n_docs, n_words))
        y = np.array([1, 0] + list(r.integers(0, 2, size=n_docs - 2)))
        yield X, y, r.integers(0, 4, size=(5, n_words))


def test_mnb_matches_exact_enumeration():
    for X, y, queries in _small_corpora(0, 200):
        m = mnb_fit(X, y)
        got = log_posterior(m, queries)
        for q, row in zip(queries, got):
            assert np.allclose(row, mnb_exact_log_posterior(X, y, q), rtol=0, atol=1e-10)


def test_bnb_matches_exact_product():
    for X, y, queries in _small_corpora(1, 200):
        m = bnb_fit(X, y)
        got = log_posterior(m, queries)
        for q, row in zip(queries, got):
            assert np.allclose(row, bnb_exact_log_posterior(X, y, q), rtol=0, atol=1e-10)


def test_bnb_add_one_example():
    X = np.vstack([np.ones((10, 2)), np.zeros((10, 2))])
    X[:, 1] = 0
    m = bnb_fit(X, [1] * 10 + [0] * 10)
    assert m.presence_probs[1, 0] == pytest.approx(11 / 12)
    assert m.presence_probs[0, 0] == pytest.approx(1 / 12)
    s = bnb_score(m, np.zeros(2))
    assert np.all(np.isfinite(s)) and s[0] != s[1]


def test_bnb_depends_only_on_presence(rng):
    X = rng.integers(0, 5, size=(30, 6))
    m = bnb_fit(X, rng.integers(0, 2, size=30))
    q = rng.integers(0, 5, size=(10, 6))
    assert np.array_equal(log_odds(m, q), log_odds(m, (q > 0) * 7))


def test_gnb_closed_form_one_feature():
    X = np.array([[1.0], [2.0], [3.0], [6.0], [8.0]])
    y = np.array([0, 0, 0, 1, 1])
    m = gnb_fit(X, y, var_smoothing=0.0)
    for x in (0.0, 2.5, 4.4, 7.0):
        j0 = math.log(3 / 5) + gaussian_log_density(x, 2.0, 2 / 3)
        j1 = math.log(2 / 5) + gaussian_log_density(x, 7.0, 1.0)
        ev = max(j0, j1) + math.log(math.exp(j0 - max(j0, j1)) + math.exp(j1 - max(j0, j1)))
        assert np.allclose(log_posterior(m, [[x]])[0], [j0 - ev, j1 - ev], atol=1e-12)


def test_gnb_constant_feature_stays_finite():
    X = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 5.0], [1.0, 4.0]])
    m = gnb_fit(X, [0, 0, 1, 1])
    assert np.all(m.variances > 0)
    assert np.all(np.isfinite(gnb_score(m, X)))
    assert np.all(np.isfinite(gnb_score(m, np.array([[3.0, 2.0]]))))


def test_gnb_class_mean_is_argmax():
    X = np.array([[0.0, 0.0], [2.0, 2.0], [10.0, 10.0], [12.0, 12.0]])
    m = gnb_fit(X, [0, 0, 1, 1])
    assert int(np.argmax(gnb_score(m, m.means[0]))) == 0
    assert int(np.argmax(gnb_score(m, m.means[1]))) == 1


def test_scores_finite_under_fuzz(rng):
    for _ in range(30):
        X = rng.integers(0, 20, size=(12, 8))
        y = np.r_[0, 1, rng.integers(0, 2, size=10)]
        q = rng.integers(0, 200, size=(4, 8))
        for model in (mnb_fit(X, y), bnb_fit(X, y), gnb_fit(X, y)):
            assert np.all(np.isfinite(log_odds(model, q)))


def test_equal_posterior_gives_zero_log_odds():
    X = np.array([[1, 0], [0, 1]])
    m = mnb_fit(X, [0, 1])
    assert log_odds(m, [[1, 1]])[0] == pytest.approx(0.0, abs=1e-15)
