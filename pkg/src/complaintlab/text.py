"""Tokenization, vocabularies, count vectors, cosine fidelity and an
extractive summarizer bounded by a word budget."""

import math
import re
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import ZeroVector

_TOKEN = re.compile(r"[^\W_]+")
_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")


def tokenize(text):
    """Lowercase and split on non-alphanumeric boundaries."""
    return _TOKEN.findall(text.lower())


class Vocabulary:
    """Lexicographically ordered token -> column map."""

    def __init__(self, words):
        self.words = sorted(set(words))
        self.index = {w: i for i, w in enumerate(self.words)}

    @classmethod
    def from_corpus(cls, docs):
        return cls(w for doc in docs for w in doc)

    def __len__(self):
        return len(self.words)

    def __contains__(self, token):
        return token in self.index

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.words == other.words

    def __repr__(self):
        return f"Vocabulary({len(self.words)} words)"


@dataclass
class CountVector:
    dims: int
    entries: dict  # column id -> positive count

    def to_array(self):
        out = np.zeros(self.dims, dtype=np.float64)
        for j, c in self.entries.items():
            out[j] = c
        return out


def count_vector(tokens, vocab):
    counts = Counter(vocab.index[t] for t in tokens if t in vocab.index)
    return CountVector(len(vocab), dict(sorted(counts.items())))


def cosine_similarity(u, v):
    """Cosine of the angle between two count (or dense) vectors."""
    a = u.to_array() if isinstance(u, CountVector) else np.asarray(u, dtype=np.float64)
    b = v.to_array() if isinstance(v, CountVector) else np.asarray(v, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector("cosine similarity of a zero vector is undefined")
    return float(np.dot(a, b) / (na * nb))


def split_sentences(text):
    return [s for s in _SENTENCE_END.split(text.strip()) if s]


def _sentence_scores(sentences, idf=None, default_idf=None):
    toks = [tokenize(s) for s in sentences]
    if idf is None:
        n = len(sentences)
        df = Counter(w for t in toks for w in set(t))
        idf = {w: math.log(n / c) for w, c in df.items()}
        default_idf = 0.0
    scores = []
    for t in toks:
        tf = Counter(t)
        scores.append(sum(c * idf.get(w, default_idf) for w, c in tf.items()))
    return scores


def summarize_extractive(text, max_words=128, idf=None, default_idf=0.0):
    """Keep the highest-scoring sentences that fit in ``max_words`` words.

    Sentences are scored by their summed TF-IDF mass (IDF over the document's
    own sentences unless an ``idf`` mapping is given), picked greedily in
    descending score with earlier sentences winning ties, and emitted in
    their original order. If no sentence fits, the best one is cut to the
    budget.
    """
    if max_words < 1:
        raise ValueError("max_words must be >= 1")
    if len(text.split()) <= max_words:
        return text
    sentences = split_sentences(text)
    scores = _sentence_scores(sentences, idf, default_idf)
    order = sorted(range(len(sentences)), key=lambda i: (-scores[i], i))
    budget = max_words
    chosen = []
    for i in order:
        n = len(sentences[i].split())
        if n <= budget:
            chosen.append(i)
            budget -= n
    if not chosen:
        return " ".join(sentences[order[0]].split()[:max_words])
    return " ".join(sentences[i] for i in sorted(chosen))


def summary_fidelity(original, summary, vocab=None):
    """Cosine similarity of term-frequency vectors, by default over the
    pair's union vocabulary."""
    a, b = tokenize(original), tokenize(summary)
    if vocab is None:
        vocab = Vocabulary(a + b)
    return cosine_similarity(count_vector(a, vocab), count_vector(b, vocab))
