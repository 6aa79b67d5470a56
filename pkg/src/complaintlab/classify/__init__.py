"""Classifiers (logistic regression, random forest, LSTM) and prediction."""

import numpy as np
import scipy.sparse as sp

from ..errors import ConfigError, FeatureModelMismatch
from .forest import ForestModel, train_forest
from .logistic import LogisticModel, train_logistic
from .lstm import LstmClassifier, LstmParams, lstm_step, train_lstm_classifier
from .split import SplitConfig, split_indices, train_test_split

FEATURE_MODES = ("tfidf", "truncated_tfidf", "embed_plain", "embed_idf")
BAG_MODES = ("tfidf", "truncated_tfidf")
CLASSIFIERS = ("lr", "rf", "lstm")


def check_compatibility(mode, classifier):
    """Reject featurization/classifier pairs that cannot work together.

    Bag-of-words representations (TF-IDF and its truncation) carry no token
    order, so they are never fed to the sequence classifier.
    """
    if mode not in FEATURE_MODES:
        raise ConfigError(f"unknown featurization mode {mode!r}")
    if classifier not in CLASSIFIERS:
        raise ConfigError(f"unknown classifier {classifier!r}")
    if classifier == "lstm" and mode in BAG_MODES:
        raise FeatureModelMismatch(
            f"{mode} is a bag-of-words representation without token order; it cannot feed an LSTM")


def _is_matrix(x):
    return sp.issparse(x) or (isinstance(x, np.ndarray) and x.ndim == 2 and x.dtype.kind in "fiub")


def predict(model, inputs):
    """Return ``(labels, scores)``.

    Logistic and LSTM models label ``score >= 0.5`` as class 1; the forest
    labels by strict majority vote, so tied votes go to class 0.
    """
    if isinstance(model, LstmClassifier):
        if _is_matrix(inputs):
            raise FeatureModelMismatch(
                "a feature matrix was given to the LSTM classifier; it needs token sequences")
        scores = model.scores(inputs)
        return (scores >= 0.5).astype(int), scores
    if not _is_matrix(inputs):
        raise FeatureModelMismatch(f"{type(model).__name__} needs a numeric feature matrix")
    X = inputs.toarray() if sp.issparse(inputs) else inputs
    if isinstance(model, LogisticModel):
        scores = model.scores(X)
        return (scores >= 0.5).astype(int), scores
    if isinstance(model, ForestModel):
        scores = model.votes(X)
        return (scores > 0.5).astype(int), scores
    raise TypeError(f"unsupported model type {type(model).__name__}")


__all__ = [
    "BAG_MODES", "CLASSIFIERS", "FEATURE_MODES", "ForestModel", "LogisticModel", "LstmClassifier",
    "LstmParams", "SplitConfig", "check_compatibility", "lstm_step", "predict", "split_indices",
    "train_forest", "train_logistic", "train_lstm_classifier", "train_test_split",
]
