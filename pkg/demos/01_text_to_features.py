"""
From raw email to a bag-of-words matrix
=======================================

Load the bundled toy corpus, run the preprocessing chain on one message,
then build the word dictionary and the count matrix every model trains on.
"""
from spamlab import (PrepConfig, balance, build_dictionary, build_matrix, load_corpus, preprocess,
                     preprocess_text, split, toy_corpus_path)

corpus = load_corpus(toy_corpus_path())
print(len(corpus), "documents;", {k.name: v for k, v in corpus.class_counts.items()})

# every preprocessing stage can be switched off on its own
text = "<p>Please CLICK here!! You are winning 3 prizes, the offers are waiting</p>"
print("full  :", preprocess_text(text))
print("raw   :", preprocess_text(text, PrepConfig.raw()))

# balance the classes, then carve out a 70/30 hold-out and 5 folds on the train part
corpus = balance(corpus, seed=0)
plan = split(corpus, train_fraction=0.7, k=5, seed=0)
print("train", len(plan.train_ids), "test", len(plan.test_ids), "fold sizes", [len(f) for f in plan.folds])

# the dictionary is the most frequent words of the training documents only
train = set(plan.train_ids)
streams = [preprocess(d) for d in corpus.documents if d.id in train]
labels = [int(d.label) for d in corpus.documents if d.id in train]
dictionary = build_dictionary(streams, size=20)
matrix = build_matrix(streams, labels, dictionary)
print("top words:", dictionary.words[:10])
print("matrix", matrix.shape, "fingerprint", matrix.fingerprint[:12])
