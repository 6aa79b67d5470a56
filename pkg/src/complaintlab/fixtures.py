"""Deterministic synthetic corpora used by the tests, demos and CLI runs."""

import csv
import io
from datetime import date, timedelta

import numpy as np

from .ingest import COLUMNS

TOY_TOKENS = ["account", "bank", "credit", "debt", "fee", "loan", "refund", "report"]


def toy_chain_transitions():
    """Row-stochastic 8 x 8 transition matrix over :data:`TOY_TOKENS`.

    Tokens 0-3 form a frequent cycle (each advances with probability 0.9 and
    otherwise jumps to its rare partner ``k + 4``); rare tokens return to 0.
    """
    P = np.zeros((8, 8))
    for k in range(4):
        P[k, (k + 1) % 4] = 0.9
        P[k, k + 4] = 0.1
    P[4:, 0] = 1.0
    return P


def toy_chain(n_docs=200, max_length=8, stop=0.0, seed=0):
    """Token lists drawn from :func:`toy_chain_transitions`, starting at ``account``.

    After each token the sequence ends with probability ``stop``, and always
    at ``max_length`` tokens.
    """
    rng = np.random.default_rng(seed)
    P = toy_chain_transitions()
    docs = []
    for _ in range(n_docs):
        k = 0
        doc = [TOY_TOKENS[k]]
        while len(doc) < max_length and not rng.random() < stop:
            k = int(rng.choice(8, p=P[k]))
            doc.append(TOY_TOKENS[k])
        docs.append(doc)
    return docs


def toy_gan_setup():
    """Real narratives, embedding provider and GAN settings for the chain smoke test.

    The recurrence is left untrained (only the emission layer learns), which
    keeps the discriminator's features fixed while the game runs.
    """
    from .featurize import HashEmbeddingProvider
    from .generate.gan import GanConfig

    docs = toy_chain(1000, max_length=8, seed=1)
    provider = HashEmbeddingProvider(dim=16, seed=0)
    config = GanConfig(max_len=10, hidden=32, epochs=300, batch_size=512, g_lr=0.03,
                       cell_lr_scale=0.0, seed=0)
    return docs, provider, config


_COMMON = (
    "i called the bank about my account and they said it would be fixed but nothing happened "
    "after several weeks of waiting on hold with customer service representatives who kept "
    "transferring me between departments without any resolution so i am filing this complaint "
    "because the company has not responded to letters emails or phone calls regarding charges"
).split()

# words that lean toward one outcome; each class also sees the other's words at a lower rate
_MERIT = ("unauthorized fraud refund reversed error duplicate overcharged dispute stolen "
          "incorrect billed twice erroneous withdrawal identity theft").split()
_NONMERIT = ("explained policy agreed terms late understood balance minimum interest "
             "statement contract scheduled disclosure annual owed").split()

PRODUCTS = ["Credit card", "Checking or savings account", "Debt collection", "Mortgage"]
ISSUES = ["Problem with a purchase", "Fees or interest", "Incorrect information", "Managing an account"]
COMPANIES = ["ALPHA BANK", "BETA FINANCIAL", "GAMMA CREDIT", "DELTA LENDING", "EPSILON TRUST"]


def desk_corpus_rows(n=2000, seed=7, lean=0.85, marker_rate=0.25, length=(12, 28)):
    """Raw complaint rows (dicts keyed by export column names).

    Half the rows are resolved with relief (meritorious). Each narrative is
    ``length`` words drawn mostly from a shared pool; a ``marker_rate``
    fraction of words are outcome-leaning, taken from the row's own class
    list with probability ``lean`` and from the other class otherwise.
    Every narrative mentions one dollar amount in (0, 10,000].
    """
    rng = np.random.default_rng(seed)
    start = date(2020, 1, 1)
    rows = []
    for i in range(n):
        merit = bool(i % 2)
        own, other = (_MERIT, _NONMERIT) if merit else (_NONMERIT, _MERIT)
        n_words = int(rng.integers(length[0], length[1] + 1))
        words = []
        for _ in range(n_words):
            if rng.random() < marker_rate:
                pool = own if rng.random() < lean else other
            else:
                pool = _COMMON
            words.append(pool[int(rng.integers(len(pool)))])
        amount = float(np.round(np.exp(rng.uniform(np.log(5), np.log(9000))), 2))
        pos = int(rng.integers(1, len(words)))
        words.insert(pos, f"${amount:,.2f}")
        if rng.random() < 0.3:
            words.insert(int(rng.integers(0, len(words))), "on XX/XX/XXXX")
        response = ("Closed with monetary relief" if rng.random() < 0.6 else "Closed with non-monetary relief") \
            if merit else "Closed with explanation"
        rows.append({
            COLUMNS["date_received"]: (start + timedelta(days=int(rng.integers(0, 1826)))).isoformat(),
            COLUMNS["product"]: PRODUCTS[int(rng.integers(len(PRODUCTS)))],
            COLUMNS["issue"]: ISSUES[int(rng.integers(len(ISSUES)))],
            COLUMNS["company"]: COMPANIES[int(rng.integers(len(COMPANIES)))],
            COLUMNS["narrative"]: " ".join(words),
            COLUMNS["company_response"]: response,
        })
    return rows


def desk_corpus_csv(n=2000, seed=7, **kw):
    """The desk-scale corpus as UTF-8 CSV bytes in the complaint export layout."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(COLUMNS.values()), lineterminator="\n")
    w.writeheader()
    w.writerows(desk_corpus_rows(n, seed, **kw))
    return buf.getvalue().encode("utf-8")
