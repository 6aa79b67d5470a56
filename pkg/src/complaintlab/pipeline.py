"""End-to-end experiment: featurize, train, predict and score one configuration.

A run fits every data-dependent transform (vocabulary, IDF, latent basis,
category dummies, standardization) on the training rows only, then applies
it unchanged to the evaluation rows.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .classify import BAG_MODES, check_compatibility, predict, split_indices
from .classify.forest import train_forest
from .classify.logistic import train_logistic
from .classify.lstm import train_lstm_classifier
from .config import ClassifierConfig, FeatureConfig
from .errors import ConfigError, DataError, EmptyCorpus
from .featurize import (DummyEncoder, FileEmbeddingProvider, HashEmbeddingProvider, Standardizer,
                        assemble_features, embed_corpus, fit_tfidf, tfidf_matrix, truncated_tfidf)
from .ingest import read_corpus
from .metrics import evaluate_all
from .text import tokenize

log = logging.getLogger(__name__)

EMBED_MODES = {"embed_plain": "plain", "embed_idf": "idf_reweighted"}


@dataclass
class Corpus:
    """Cleaned records with their tokens, 0/1 labels and row numbers in the source file."""

    records: list
    docs: list
    labels: np.ndarray
    rows: np.ndarray

    def __len__(self):
        return len(self.records)

    def subset(self, idx):
        idx = np.asarray(idx, dtype=int)
        return Corpus([self.records[i] for i in idx], [self.docs[i] for i in idx], self.labels[idx], self.rows[idx])


def corpus_from_records(records):
    keep, docs, rows = [], [], []
    for i, r in enumerate(records):
        toks = tokenize(r.narrative)
        if toks:
            keep.append(r)
            docs.append(toks)
            rows.append(i)
    if len(keep) < len(records):
        log.warning("dropped %d record(s) with no word tokens", len(records) - len(keep))
    if not keep:
        raise EmptyCorpus("no records with word tokens")
    labels = np.array([int(r.meritorious) for r in keep])
    return Corpus(keep, docs, labels, np.array(rows))


def load_corpus(path):
    return corpus_from_records(read_corpus(path))


def split_corpus(corpus, split_config):
    train_idx, test_idx = split_indices(len(corpus), split_config)
    return corpus.subset(train_idx), corpus.subset(test_idx)


def _has_metadata(records):
    return all(r.log_dollar is not None for r in records)


class FeatureBuilder:
    """Training-split-fitted map from a :class:`Corpus` to classifier inputs.

    Matrix classifiers get ``[dummies | log dollar | text]`` standardized
    column-wise (dummies and log dollar only when ``config.metadata``);
    the sequence classifier gets token lists.
    """

    def __init__(self, config: FeatureConfig, sequence=False, embeddings=None):
        if embeddings is not None and config.mode not in EMBED_MODES:
            raise ConfigError("an embedding file only applies to embed_plain / embed_idf")
        if embeddings is not None and sequence:
            raise ConfigError("an embedding file holds document vectors and cannot feed the LSTM")
        self.config = config
        self.sequence = sequence
        self.embeddings = embeddings
        self.provider = HashEmbeddingProvider(config.embed_dim, seed=config.seed)

    def fit(self, train: Corpus):
        cfg = self.config
        self.tfidf = fit_tfidf(train.docs, tf_cap=cfg.tf_cap)
        if self.sequence:
            return self
        self.basis = None
        if cfg.mode == "truncated_tfidf":
            _, f = truncated_tfidf(tfidf_matrix(self.tfidf, train.docs), cfg.k, seed=cfg.seed, return_factors=True)
            self.basis = f.V
        self.metadata = cfg.metadata
        if self.metadata and not _has_metadata(train.records):
            log.warning("training records lack dollar values; using text features only")
            self.metadata = False
        if self.metadata:
            self.dummies = DummyEncoder().fit(train.records)
        self.scaler = Standardizer().fit(self._raw(train))
        return self

    def _text(self, corpus):
        mode = self.config.mode
        if mode in BAG_MODES:
            M = tfidf_matrix(self.tfidf, corpus.docs)
            return np.asarray((M @ self.basis) if self.basis is not None else M.toarray())
        if self.embeddings is not None:
            if corpus.rows.max() >= self.embeddings.matrix.shape[0]:
                raise DataError(f"embedding file has {self.embeddings.matrix.shape[0]} rows, "
                                f"corpus needs row {corpus.rows.max()}")
            return self.embeddings.matrix[corpus.rows]
        return embed_corpus(self.provider, corpus.docs, EMBED_MODES[mode], self.tfidf)

    def _raw(self, corpus):
        text = self._text(corpus)
        if not self.metadata:
            return text
        if not _has_metadata(corpus.records):
            raise DataError("evaluation records lack dollar values needed by the metadata columns")
        numeric = np.array([r.log_dollar for r in corpus.records])
        return assemble_features(text, self.dummies.transform(corpus.records), numeric)

    def transform(self, corpus: Corpus):
        if self.sequence:
            return list(corpus.docs)
        return self.scaler.transform(self._raw(corpus))


def train_model(inputs, labels, config: ClassifierConfig, builder: FeatureBuilder):
    c = config
    if c.name == "lr":
        return train_logistic(inputs, labels, lr=c.lr_learning_rate, epochs=c.lr_epochs, l2=c.lr_l2, seed=c.seed)
    if c.name == "rf":
        return train_forest(inputs, labels, n_trees=c.rf_n_trees, max_depth=c.rf_max_depth,
                            min_leaf=c.rf_min_leaf, seed=c.seed)
    if c.name == "lstm":
        mode = EMBED_MODES[builder.config.mode]
        return train_lstm_classifier(inputs, labels, builder.provider, mode=mode,
                                     tfidf_model=builder.tfidf if mode == "idf_reweighted" else None,
                                     hidden=c.lstm_hidden, epochs=c.lstm_epochs, batch_size=c.lstm_batch_size,
                                     lr=c.lstm_learning_rate, seed=c.seed)
    raise ConfigError(f"unknown classifier {c.name!r}")


@dataclass
class RunResult:
    model: object
    builder: FeatureBuilder
    report: object
    predictions: np.ndarray


def make_builder(feature_config, classifier_config, embeddings_path=None):
    check_compatibility(feature_config.mode, classifier_config.name)
    embeddings = FileEmbeddingProvider(embeddings_path) if embeddings_path else None
    return FeatureBuilder(feature_config, sequence=classifier_config.name == "lstm", embeddings=embeddings)


def run_experiment(train: Corpus, test: Corpus, feature_config: FeatureConfig,
                   classifier_config: ClassifierConfig, embeddings_path=None, model=None):
    """Fit features on ``train``, train (unless ``model`` is given), and score on ``test``."""
    builder = make_builder(feature_config, classifier_config, embeddings_path).fit(train)
    if model is None:
        model = train_model(builder.transform(train), train.labels, classifier_config, builder)
    labels, _ = predict(model, builder.transform(test))
    return RunResult(model, builder, evaluate_all(test.labels, labels), labels)
