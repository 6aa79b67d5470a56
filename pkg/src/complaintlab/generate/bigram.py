"""First-order Markov (bigram) language model with seeded sampling."""

from collections import Counter, defaultdict

import numpy as np

from ..errors import CorpusTooShort, UnknownStartToken


class BigramModel:
    """Maximum-likelihood bigram transitions ``P(w_i | w_{i-1})``.

    ``counts`` keeps the raw pair tallies in first-seen order; contexts that
    only ever end a document have no entry in ``contexts``.
    """

    def __init__(self, counts, start_counts, vocabulary):
        self.counts = counts
        self.start_counts = start_counts
        self.vocabulary = vocabulary
        self.contexts = {}
        for prev, nxt in counts.items():
            total = sum(nxt.values())
            self.contexts[prev] = {w: c / total for w, c in nxt.items()}
        total = sum(start_counts.values())
        self.start_distribution = {w: c / total for w, c in start_counts.items()}

    def prob(self, prev, word):
        return self.contexts.get(prev, {}).get(word, 0.0)

    def table(self):
        """Rows ``((prev, word), frequency, probability)`` in first-seen order."""
        return [((p, w), c, self.contexts[p][w]) for p, nxt in self.counts.items() for w, c in nxt.items()]


def fit_bigram(docs):
    counts = defaultdict(Counter)
    starts = Counter()
    vocab = set()
    pairs = 0
    for doc in docs:
        vocab.update(doc)
        if doc:
            starts[doc[0]] += 1
        for prev, word in zip(doc, doc[1:]):
            counts[prev][word] += 1
            pairs += 1
    if pairs == 0:
        raise CorpusTooShort("need at least one document with two tokens")
    return BigramModel(dict(counts), starts, vocab)


def bigram_generate(model, start_token, length, seed=0):
    """Sample up to ``length`` tokens starting from ``start_token``.

    Stops early when the current token has no observed continuation.
    """
    if start_token not in model.vocabulary:
        raise UnknownStartToken(start_token)
    if length < 1:
        raise ValueError("length must be >= 1")
    rng = np.random.default_rng(seed)
    out = [start_token]
    while len(out) < length:
        dist = model.contexts.get(out[-1])
        if not dist:
            break
        words = sorted(dist)
        probs = np.array([dist[w] for w in words])
        out.append(words[int(rng.choice(len(words), p=probs))] if len(words) > 1 else words[0])
    return out
