"""Text featurization: TF-IDF, truncated TF-IDF, composed token embeddings,
dummy encoding and Algorithm-1 style feature assembly."""

import hashlib
import logging
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DataError, EmptyCorpus, EmptyDocument, RowCountMismatch
from .linalg import read_dense, truncated_svd
from .text import Vocabulary

log = logging.getLogger(__name__)

EMBED_DIM = 768


@dataclass
class TfIdfModel:
    vocab: Vocabulary
    idf: np.ndarray
    n_docs: int
    tf_cap: int | None = None

    def idf_of(self, token):
        """IDF of ``token``; tokens unseen at fit time get ``ln(n_docs)``."""
        j = self.vocab.index.get(token)
        return math.log(self.n_docs) if j is None else float(self.idf[j])


def fit_tfidf(docs, tf_cap=None):
    """Fit vocabulary and ``idf = ln(n / n_w)`` on tokenized documents."""
    docs = list(docs)
    if not docs or not any(docs):
        raise EmptyCorpus("need at least one document with one token")
    vocab = Vocabulary.from_corpus(docs)
    df = np.zeros(len(vocab))
    for doc in docs:
        for w in set(doc):
            df[vocab.index[w]] += 1
    idf = np.log(len(docs) / df)
    idf[df == len(docs)] = 0.0  # exact zero for words in every document
    return TfIdfModel(vocab, idf, len(docs), tf_cap)


def tfidf_matrix(model, docs, tf_cap=None):
    """Sparse ``n x |W|`` TF-IDF matrix; out-of-vocabulary tokens are skipped."""
    cap = tf_cap if tf_cap is not None else model.tf_cap
    rows, cols, vals = [], [], []
    for i, doc in enumerate(docs):
        counts = Counter(model.vocab.index[t] for t in doc if t in model.vocab.index)
        for j in sorted(counts):
            tf = counts[j] if cap is None else min(counts[j], cap)
            v = tf * model.idf[j]
            if v != 0:
                rows.append(i)
                cols.append(j)
                vals.append(v)
    m = sp.csr_matrix((np.asarray(vals, dtype=np.float64), (rows, cols)), shape=(len(docs), len(model.vocab)))
    m.sort_indices()
    return m


def truncated_tfidf(matrix, k=EMBED_DIM, seed=0, oversample=10, power_iters=2, return_factors=False):
    """Latent-semantic document coordinates ``U @ diag(S)`` of rank ``k``.

    ``k`` is clamped to ``min(n, |W|)`` with a warning on small corpora.
    """
    limit = min(matrix.shape)
    if k > limit:
        log.warning("truncated_tfidf: clamping k=%d to %d", k, limit)
        k = limit
    f = truncated_svd(matrix, k, seed=seed, oversample=oversample, power_iters=power_iters)
    features = f.U * f.S
    return (features, f) if return_factors else features


class HashEmbeddingProvider:
    """Deterministic stand-in for pretrained token embeddings.

    Token vectors are unit Gaussians seeded by a 64-bit hash of the token,
    positional vectors are sinusoidal and the segment vector is zero.
    """

    def __init__(self, dim=EMBED_DIM, seed=0, scale=1.0):
        self.dim = dim
        self.seed = seed
        self.scale = scale
        self._cache = {}

    def token_vector(self, token):
        vec = self._cache.get(token)
        if vec is None:
            h = int.from_bytes(hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(), "little")
            vec = self.scale * np.random.default_rng([self.seed, h]).standard_normal(self.dim)
            vec.setflags(write=False)
            self._cache[token] = vec
        return vec

    def positional_vector(self, i):
        return positional_table(i + 1, self.dim, start=i)[0]

    def segment_vector(self, token):
        return np.zeros(self.dim)


def positional_table(n, dim, start=0):
    """Sinusoidal position vectors for positions ``start..n-1``."""
    pos = np.arange(start, n)[:, None]
    rate = 1.0 / 10000 ** (2 * (np.arange(dim) // 2) / dim)
    ang = pos * rate[None, :]
    out = np.where(np.arange(dim) % 2 == 0, np.sin(ang), np.cos(ang))
    return out


class FileEmbeddingProvider:
    """Precomputed document vectors loaded from a dense matrix file.

    Row ``i`` is the vector of corpus document ``i``; there are no token-level
    vectors, so sequence models cannot use this provider.
    """

    def __init__(self, path):
        self.matrix = read_dense(path)
        self.dim = self.matrix.shape[1]

    def doc_vector(self, i):
        return self.matrix[i]


def compose_token_embedding(provider, token, position, idf=None):
    """``e_token + e_pos + e_seg``, with the token part scaled by ``idf`` if given."""
    e_tok = provider.token_vector(token)
    if idf is not None:
        e_tok = idf * e_tok
    return e_tok + provider.positional_vector(position) + provider.segment_vector(token)


def doc_embedding(provider, tokens, mode="plain", tfidf_model=None):
    """Mean of composed token embeddings (the pooled sentence vector)."""
    if not tokens:
        raise EmptyDocument("cannot embed an empty document")
    if mode not in ("plain", "idf_reweighted"):
        raise ValueError(f"unknown embedding mode {mode!r}")
    if mode == "idf_reweighted" and tfidf_model is None:
        raise ValueError("idf_reweighted mode needs a fitted TfIdfModel")
    acc = np.zeros(provider.dim)
    for i, tok in enumerate(tokens):
        idf = tfidf_model.idf_of(tok) if mode == "idf_reweighted" else None
        acc += compose_token_embedding(provider, tok, i, idf)
    return acc / len(tokens)


def sequence_embeddings(provider, tokens, mode="plain", tfidf_model=None):
    """``len(tokens) x dim`` matrix of composed embeddings, one row per token."""
    if not tokens:
        raise EmptyDocument("cannot embed an empty document")
    tok = np.stack([provider.token_vector(t) for t in tokens])
    if mode == "idf_reweighted":
        tok = tok * np.array([tfidf_model.idf_of(t) for t in tokens])[:, None]
    seg = np.stack([provider.segment_vector(t) for t in tokens])
    return tok + positional_table(len(tokens), provider.dim) + seg


def embed_corpus(provider, docs, mode="plain", tfidf_model=None):
    """Document-feature matrix for a tokenized corpus."""
    if isinstance(provider, FileEmbeddingProvider):
        if provider.matrix.shape[0] != len(docs):
            raise RowCountMismatch(
                f"embedding file has {provider.matrix.shape[0]} rows, corpus has {len(docs)}")
        return provider.matrix.copy()
    return np.stack([sequence_embeddings(provider, d, mode, tfidf_model).mean(axis=0) for d in docs])


class DummyEncoder:
    """One-hot encoder over categorical columns, categories in sorted order."""

    def __init__(self, columns=("product", "issue", "company")):
        self.columns = tuple(columns)
        self.categories = {}
        self.offsets = {}

    @property
    def width(self):
        return sum(len(c) for c in self.categories.values())

    def fit(self, records):
        if not records:
            raise DataError("cannot fit a dummy encoder on no records")
        offset = 0
        for col in self.columns:
            cats = sorted({getattr(r, col) for r in records})
            self.categories[col] = cats
            self.offsets[col] = offset
            offset += len(cats)
        return self

    def transform(self, records):
        out = np.zeros((len(records), self.width))
        for col in self.columns:
            lookup = {c: self.offsets[col] + j for j, c in enumerate(self.categories[col])}
            for i, r in enumerate(records):
                j = lookup.get(getattr(r, col))
                if j is not None:
                    out[i, j] = 1.0
        return out

    def decode(self, X):
        """Recover category tuples from one-hot rows (``None`` for all-zero blocks)."""
        rows = []
        for x in np.atleast_2d(X):
            row = []
            for col in self.columns:
                lo = self.offsets[col]
                block = x[lo:lo + len(self.categories[col])]
                row.append(self.categories[col][int(np.argmax(block))] if block.any() else None)
            rows.append(tuple(row))
        return rows


def dummy_encode(records, columns=("product", "issue", "company")):
    enc = DummyEncoder(columns).fit(records)
    return enc.transform(records), enc


def assemble_features(text_features, dummies, numeric):
    """Concatenate ``[dummies | numeric | text_features]`` column-wise."""
    text_features = np.asarray(text_features, dtype=np.float64)
    n = text_features.shape[0]
    dummies = np.zeros((n, 0)) if dummies is None else np.asarray(dummies, dtype=np.float64)
    if dummies.ndim != 2:
        raise ValueError("dummies must be a 2-D matrix")
    numeric = np.zeros((n, 0)) if numeric is None else np.asarray(numeric, dtype=np.float64).reshape(len(numeric), -1)
    if not dummies.shape[0] == numeric.shape[0] == n:
        raise RowCountMismatch(
            f"row counts differ: dummies {dummies.shape[0]}, numeric {numeric.shape[0]}, text {n}")
    return np.hstack([dummies, numeric, text_features])


class Standardizer:
    """Per-column z-scoring fit on training rows only; constant columns pass through centred."""

    def fit(self, X):
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        std[std == 0] = 1.0
        self.std_ = std
        return self

    def transform(self, X):
        return (X - self.mean_) / self.std_
