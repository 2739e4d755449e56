"""Spam classification laboratory.

Bag-of-words features from raw email text, twelve classifiers implemented on
numpy/scipy, cross-validated evaluation, paired significance tests and
Shapley attributions.
"""
__version__ = "0.1.0"

from .corpus import Corpus, Document, Label, SplitPlan, balance, load_corpus, split  # noqa: E402
from .errors import (BalanceError, ConfigurationError, DegenerateTrainingError, EmptyDictionaryError,  # noqa: E402
                     FeasibilityError, IncompatibleFeaturesError, MalformedCorpusError, NumericalFailure,
                     SpamLabError, StratificationError)
from .models.core import (ClassifierSpec, ModelKind, TrainedModel, decision_scores, default_specs,  # noqa: E402
                          fit, predict)
from .textprep import PrepConfig, TokenStream, preprocess, preprocess_text  # noqa: E402
from .vectorize import Dictionary, FeatureMatrix, build_dictionary, build_matrix, vectorize  # noqa: E402


def toy_corpus_path():
    """Directory of the bundled 40-document toy corpus (20 ham, 20 spam)."""
    from importlib import resources
    return resources.files("spamlab").joinpath("data").joinpath("toy_corpus")


__all__ = [
    "BalanceError", "ClassifierSpec", "ConfigurationError", "Corpus", "DegenerateTrainingError", "Dictionary",
    "Document", "EmptyDictionaryError", "FeasibilityError", "FeatureMatrix", "IncompatibleFeaturesError", "Label",
    "MalformedCorpusError", "ModelKind", "NumericalFailure", "PrepConfig", "SpamLabError", "SplitPlan",
    "StratificationError", "TokenStream", "TrainedModel", "balance", "build_dictionary", "build_matrix",
    "decision_scores", "default_specs", "fit", "load_corpus", "predict", "preprocess", "preprocess_text", "split",
    "toy_corpus_path", "vectorize",
]
