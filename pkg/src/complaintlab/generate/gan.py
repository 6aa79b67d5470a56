"""LSTM generator against a logistic discriminator on final hidden states.

The generator emits tokens in free-running mode::

    h_0 = 0
    z_t ~ softmax([h_{t-1}, 1] @ psi)
    x_t = embed(z_t, t) (+ Gaussian noise on the generated branch)
    h_t = LSTM(x_t, h_{t-1})

until the end-of-sequence token or ``max_len`` steps. Real narratives are
encoded with the same recurrence. The discriminator scores a final hidden
state with ``sigmoid([h, 1] @ phi)``, and the game value is

    V = mean_real log D(h) + mean_fake log(1 - D(h)).

The discriminator ascends V. The generator ascends the non-saturating
objective ``mean_fake log D(h)`` using the score-function estimator for the
sampled tokens; the pathwise gradient of the final hidden state is optional.
"""

import csv
import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..classify.lstm import Adam, LstmParams, LstmTape, clip_by_norm
from ..errors import CorpusTooSmall, DimensionMismatch, EmptyBatch, EmptySequence, NonFiniteLoss
from ..featurize import positional_table
from ..ingest import ComplaintRecord, write_corpus
from ..linalg import log_sigmoid, log_softmax, sigmoid, softmax

log = logging.getLogger(__name__)

EOS = "<eos>"


@dataclass(frozen=True)
class GanConfig:
    max_len: int = 50
    noise_sigma: float = 0.1
    d_steps: int = 1
    g_lr: float = 1e-2
    d_lr: float = 1e-2
    d_l2: float = 1e-3
    epochs: int = 300
    batch_size: int = 64
    hidden: int = 768
    holdout: float = 0.2
    baseline_decay: float = 0.9
    cell_lr_scale: float = 1.0
    forget_bias: float = 1.0
    min_count: int = 1
    clip: float = 5.0
    pathwise: bool = False
    samples_per_label: int = 5000
    seed: int = 0

    def __post_init__(self):
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if self.d_steps < 1 or self.epochs < 0 or self.batch_size < 1:
            raise ValueError("d_steps and batch_size must be positive, epochs non-negative")


@dataclass
class GeneratorParams:
    cell: LstmParams
    psi: np.ndarray  # (H + 1) x V
    vocab: list  # token strings, EOS last
    embeddings: np.ndarray  # V x D token vectors

    @property
    def eos(self):
        return len(self.vocab) - 1

    def copy(self):
        return GeneratorParams(self.cell.copy(), self.psi.copy(), list(self.vocab), self.embeddings)


@dataclass
class DiscriminatorParams:
    phi: np.ndarray  # H + 1


@dataclass
class Rollouts:
    ids: np.ndarray  # B x T token ids, -1 after the sequence stopped
    mask: np.ndarray  # B x T, 1 where a token was emitted
    noise: np.ndarray | None  # T x B x D
    final_h: np.ndarray  # B x H
    hiddens: list  # h_0 .. h_T, each B x H
    log_prob: np.ndarray  # B, log-probability of each sequence

    def token_lists(self, vocab, drop_eos=True):
        out = []
        for row, m in zip(self.ids, self.mask):
            toks = [vocab[i] for i, keep in zip(row, m) if keep]
            if drop_eos and toks and toks[-1] == EOS:
                toks = toks[:-1]
            out.append(toks)
        return out


def init_generator(vocab_tokens, provider, hidden, rng, psi_scale=0.01, forget_bias=1.0):
    vocab = sorted(set(vocab_tokens) - {EOS}) + [EOS]
    emb = np.stack([provider.token_vector(w) for w in vocab])
    cell = LstmParams.init(provider.dim, hidden, rng, forget_bias=forget_bias)
    psi = psi_scale * rng.standard_normal((hidden + 1, len(vocab)))
    return GeneratorParams(cell, psi, vocab, emb)


def _inputs(gen, ids, t):
    """Embeddings of token ids at position ``t`` (ids of -1 give zero rows)."""
    x = gen.embeddings[np.maximum(ids, 0)] + positional_table(t + 1, gen.embeddings.shape[1], start=t)
    x[ids < 0] = 0.0
    return x


class _Trace:
    """Forward record of a batch of generator sequences, sampled or forced."""

    def __init__(self, gen, batch):
        self.gen = gen
        self.tape = LstmTape(gen.cell, batch)
        self.steps = []  # (h_prev, probs, ids, active)


def _run(gen, max_len, batch, rng=None, forced=None, noise_sigma=0.0, noise=None):
    """Run ``batch`` sequences for at most ``max_len`` steps.

    With ``forced`` (B x T ids, -1 padded) the tokens are replayed instead of
    sampled. Noise is drawn from ``rng`` when ``noise_sigma > 0`` unless an
    explicit ``noise`` array is supplied.
    """
    tr = _Trace(gen, batch)
    H, D = gen.cell.hidden, gen.cell.input_dim
    T = max_len if forced is None else min(max_len, forced.shape[1])
    ids = np.full((batch, T), -1, dtype=np.int64)
    mask = np.zeros((batch, T))
    noise_used = None if noise is None and noise_sigma == 0 else np.zeros((T, batch, D))
    active = np.ones(batch, dtype=bool)
    log_prob = np.zeros(batch)
    for t in range(T):
        if forced is not None:
            active = active & (forced[:, t] >= 0)
        if not active.any():
            ids, mask = ids[:, :t], mask[:, :t]
            if noise_used is not None:
                noise_used = noise_used[:t]
            break
        h_prev = tr.tape.h
        logits = h_prev @ gen.psi[:H] + gen.psi[H]
        probs = softmax(logits)
        if forced is None:
            u = rng.random(batch)
            z = np.minimum((np.cumsum(probs, axis=1) < u[:, None]).sum(axis=1), probs.shape[1] - 1)
        else:
            z = np.where(active, forced[:, t], 0)
        z = np.where(active, z, -1)
        lp = log_softmax(logits)[np.arange(batch), np.maximum(z, 0)]
        log_prob += np.where(active, lp, 0.0)
        x = _inputs(gen, z, t)
        if noise is not None:
            x = x + noise[t]
            noise_used[t] = noise[t]
        elif noise_sigma > 0:
            eps = noise_sigma * rng.standard_normal((batch, D))
            eps[~active] = 0.0
            x = x + eps
            noise_used[t] = eps
        tr.tape.step(x, active)
        tr.steps.append((h_prev, probs, z, active.copy()))
        ids[:, t] = z
        mask[:, t] = active
        active = active & (z != gen.eos)
    ro = Rollouts(ids, mask, noise_used, tr.tape.h, tr.tape.hs, log_prob)
    return ro, tr


def generator_rollout(gen, max_len, seed=0, noise_sigma=0.0, batch=1):
    """Sample ``batch`` free-running sequences; deterministic under ``seed``.

    Returns the :class:`Rollouts` record (token ids, hidden trajectory, final h).
    """
    rng = np.random.default_rng(seed)
    ro, _ = _run(gen, max_len, batch, rng=rng, noise_sigma=noise_sigma)
    return ro


def _encode_ids(gen, docs, max_len=None):
    """Token lists -> padded id matrix with EOS appended and truncation to ``max_len``."""
    index = {w: i for i, w in enumerate(gen.vocab)}
    rows = []
    for d in docs:
        ids = [index[w] for w in d if w in index] + [gen.eos]
        rows.append(ids[:max_len] if max_len else ids)
    T = max(len(r) for r in rows)
    out = np.full((len(rows), T), -1, dtype=np.int64)
    for j, r in enumerate(rows):
        out[j, :len(r)] = r
    return out


def encode_real(gen, docs, max_len=None):
    """Final hidden state of each real narrative under the generator's recurrence."""
    if not docs or any(len(d) == 0 for d in docs):
        raise EmptySequence("real narratives must be non-empty")
    ids = _encode_ids(gen, docs, max_len)
    tape = LstmTape(gen.cell, len(docs))
    for t in range(ids.shape[1]):
        tape.step(_inputs(gen, ids[:, t], t), ids[:, t] >= 0)
    return tape.h


def discriminator_score(h, phi):
    h = np.asarray(h, dtype=np.float64)
    if h.shape[-1] + 1 != np.shape(phi)[0]:
        raise DimensionMismatch(f"hidden width {h.shape[-1]} does not match phi of length {np.shape(phi)[0]}")
    return sigmoid(h @ phi[:-1] + phi[-1])


def gan_value(real_h, fake_h, phi):
    """Empirical game value ``mean log D(real) + mean log(1 - D(fake))``."""
    real_h, fake_h = np.atleast_2d(real_h), np.atleast_2d(fake_h)
    if real_h.shape[0] == 0 or fake_h.shape[0] == 0:
        raise EmptyBatch("both batches must be non-empty")
    a_r = real_h @ phi[:-1] + phi[-1]
    a_f = fake_h @ phi[:-1] + phi[-1]
    return float(np.mean(log_sigmoid(a_r)) + np.mean(log_sigmoid(-a_f)))


def gan_value_grad(real_h, fake_h, phi):
    """Gradient of :func:`gan_value` with respect to ``phi``."""
    real_h, fake_h = np.atleast_2d(real_h), np.atleast_2d(fake_h)
    a_r = real_h @ phi[:-1] + phi[-1]
    a_f = fake_h @ phi[:-1] + phi[-1]
    w_r = 1 - sigmoid(a_r)
    w_f = sigmoid(a_f)
    g = np.empty_like(phi)
    g[:-1] = real_h.T @ w_r / len(a_r) - fake_h.T @ w_f / len(a_f)
    g[-1] = w_r.mean() - w_f.mean()
    return g


def _generator_grads(tr, ro, phi, weights, baseline, pathwise=True, reward_h=None):
    """Gradient of ``sum_b weights_b * [(R_b - baseline) log p(z_b) + R_b]``, ``R = log D(h_T)``.

    Rewards are constants in the score term. With ``pathwise`` the final
    hidden state's dependence on the cell weights is differentiated too;
    otherwise the reward is a fixed function of the token sequence, scored
    from ``reward_h`` when given. Returns ``(dW, db, dpsi, rewards)``.
    """
    gen = tr.gen
    H = gen.cell.hidden
    h_T = ro.final_h if reward_h is None else reward_h
    a = h_T @ phi[:-1] + phi[-1]
    rewards = log_sigmoid(a)
    adv = weights * (rewards - baseline)
    T = len(tr.steps)
    dH = np.zeros((T + 1,) + ro.final_h.shape)
    dpsi = np.zeros_like(gen.psi)
    for t, (h_prev, probs, z, active) in enumerate(tr.steps):
        dlogits = -probs
        rows = np.nonzero(active)[0]
        dlogits[rows, z[rows]] += 1.0
        dlogits *= (adv * active)[:, None]
        dpsi[:H] += h_prev.T @ dlogits
        dpsi[H] += dlogits.sum(axis=0)
        dH[t] += dlogits @ gen.psi[:H].T
    if pathwise:
        dH[T] += (weights * (1 - sigmoid(a)))[:, None] * phi[:-1][None, :]
    dW, db, _ = tr.tape.backward(dH)
    return dW, db, dpsi, rewards


def score_function_gradient(gen, phi, forced, weights, baseline=0.0, max_len=None, noise=None, encoder=None):
    """Score-function gradient of the generator objective for given sequences.

    ``forced`` holds token ids (-1 padded); each row contributes with its
    weight. Used both for training batches (weights ``1/B``) and for exact
    expectations over enumerated sequences (weights ``p(z)``). When
    ``encoder`` (a :class:`GeneratorParams`) is given, rewards come from its
    frozen recurrence and no pathwise term is taken.
    """
    max_len = forced.shape[1] if max_len is None else max_len
    ro, tr = _run(gen, max_len, forced.shape[0], forced=forced, noise=noise)
    reward_h = None
    if encoder is not None:
        reward_h, _ = _run(encoder, max_len, forced.shape[0], forced=ro.ids, noise=ro.noise)[0].final_h, None
    dW, db, dpsi, _ = _generator_grads(tr, ro, phi, np.asarray(weights, dtype=np.float64), baseline,
                                       pathwise=encoder is None, reward_h=reward_h)
    return dW, db, dpsi


def enumerate_sequences(gen, max_len):
    """Every token sequence the generator can emit within ``max_len`` steps, -1 padded."""
    V, eos = len(gen.vocab), gen.eos
    seqs = []
    for n in range(1, max_len + 1):
        for combo in itertools.product(range(V), repeat=n):
            if eos in combo[:-1]:
                continue
            if n < max_len and combo[-1] != eos:
                continue
            seqs.append(list(combo) + [-1] * (max_len - n))
    return np.array(seqs, dtype=np.int64)


def sequence_log_probs(gen, forced, max_len=None):
    max_len = forced.shape[1] if max_len is None else max_len
    ro, _ = _run(gen, max_len, forced.shape[0], forced=forced)
    return ro.log_prob, ro.final_h


def expected_generator_objective(gen, phi, max_len, encoder=None):
    """Exact ``E[log D(h_T)]`` by enumerating all rollouts (noise-free).

    Hidden states come from ``encoder`` when given, else from ``gen`` itself.
    """
    seqs = enumerate_sequences(gen, max_len)
    lp, h = sequence_log_probs(gen, seqs, max_len)
    if encoder is not None:
        _, h = sequence_log_probs(encoder, seqs, max_len)
    return float(np.sum(np.exp(lp) * log_sigmoid(h @ phi[:-1] + phi[-1])))


def bigram_distribution(seqs):
    counts = {}
    for s in seqs:
        for pair in zip(s, s[1:]):
            counts[pair] = counts.get(pair, 0) + 1
    total = sum(counts.values())
    return {k: v / total for k, v in counts.items()} if total else {}


def js_divergence(p, q):
    """Jensen-Shannon divergence (natural log) between two sparse distributions."""
    keys = sorted(set(p) | set(q), key=repr)
    a = np.array([p.get(k, 0.0) for k in keys])
    b = np.array([q.get(k, 0.0) for k in keys])
    m = 0.5 * (a + b)

    def kl(x):
        nz = x > 0
        return float(np.sum(x[nz] * np.log(x[nz] / m[nz])))

    return 0.5 * kl(a) + 0.5 * kl(b)


@dataclass
class GanHistory:
    rows: list = field(default_factory=list)  # dicts: epoch, V, d_accuracy, js_divergence

    def append(self, **row):
        self.rows.append(row)

    def column(self, name):
        return [r[name] for r in self.rows]

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["epoch", "V", "d_accuracy", "js_divergence"])
            for r in self.rows:
                w.writerow([r["epoch"], repr(r["V"]), repr(r["d_accuracy"]), repr(r["js_divergence"])])


def _with_eos(docs, max_len):
    return [(list(d) + [EOS])[:max_len] for d in docs]


def train_gan(real_docs, provider, config=None):
    """Adversarial training on the narratives of one label.

    Returns ``(GeneratorParams, DiscriminatorParams, GanHistory)``.
    """
    config = config or GanConfig()
    real_docs = [list(d) for d in real_docs]
    if config.min_count > 1:
        counts = Counter(w for d in real_docs for w in d)
        real_docs = [[w for w in d if counts[w] >= config.min_count] for d in real_docs]
    real_docs = [d for d in real_docs if len(d) > 0]
    if len(real_docs) < 2:
        raise CorpusTooSmall("need at least two non-empty real narratives")
    rng = np.random.default_rng(config.seed)
    gen = init_generator({w for d in real_docs for w in d}, provider, config.hidden, rng,
                         forget_bias=config.forget_bias)
    H = config.hidden
    disc = DiscriminatorParams(np.zeros(H + 1))

    perm = rng.permutation(len(real_docs))
    n_hold = min(max(1, int(round(config.holdout * len(real_docs)))), len(real_docs) - 1)
    held = [real_docs[i] for i in perm[:n_hold]]
    train = [real_docs[i] for i in perm[n_hold:]]
    real_bigrams = bigram_distribution(_with_eos(train, config.max_len))

    g_opt = Adam([gen.cell.W.shape, gen.cell.b.shape, gen.psi.shape], lr=config.g_lr, beta1=0.5)
    d_opt = Adam([disc.phi.shape], lr=config.d_lr, beta1=0.5)
    history = GanHistory()
    baseline = None
    B = config.batch_size
    for epoch in range(1, config.epochs + 1):
        for _ in range(config.d_steps):
            idx = rng.choice(len(train), size=min(B, len(train)), replace=False)
            real_h = encode_real(gen, [train[i] for i in idx], config.max_len)
            fake, _ = _run(gen, config.max_len, B, rng=rng, noise_sigma=config.noise_sigma)
            g = gan_value_grad(real_h, fake.final_h, disc.phi) - config.d_l2 * disc.phi
            step = [-g]
            d_opt.update([disc.phi], step)

        ro, tr = _run(gen, config.max_len, B, rng=rng, noise_sigma=config.noise_sigma)
        rewards = log_sigmoid(ro.final_h @ disc.phi[:-1] + disc.phi[-1])
        mean_r = float(rewards.mean())
        baseline = mean_r if baseline is None else config.baseline_decay * baseline + (1 - config.baseline_decay) * mean_r
        dW, db, dpsi, _ = _generator_grads(tr, ro, disc.phi, np.full(B, 1.0 / B), baseline,
                                           pathwise=config.pathwise)
        grads = clip_by_norm([-dW * config.cell_lr_scale, -db * config.cell_lr_scale, -dpsi], config.clip)
        g_opt.update([gen.cell.W, gen.cell.b, gen.psi], grads)

        # evaluation on held-out real narratives against a fresh fake batch
        real_h = encode_real(gen, held, config.max_len)
        fake, _ = _run(gen, config.max_len, max(len(held), B), rng=rng, noise_sigma=config.noise_sigma)
        V = gan_value(real_h, fake.final_h, disc.phi)
        d_real = discriminator_score(real_h, disc.phi)
        d_fake = discriminator_score(fake.final_h, disc.phi)
        acc = (np.sum(d_real >= 0.5) + np.sum(d_fake < 0.5)) / (len(d_real) + len(d_fake))
        js = js_divergence(bigram_distribution(fake.token_lists(gen.vocab, drop_eos=False)), real_bigrams)
        if not (np.isfinite(V) and np.all(np.isfinite(gen.psi)) and np.all(np.isfinite(gen.cell.W))
                and np.all(np.isfinite(disc.phi))):
            raise NonFiniteLoss(f"non-finite value or parameters at epoch {epoch} (V={V})")
        history.append(epoch=epoch, V=V, d_accuracy=float(acc), js_divergence=js)
    return gen, disc, history


@dataclass(frozen=True)
class SyntheticRecord:
    tokens: list
    label: bool  # True = meritorious


def sample_narratives(gen, n, max_len, seed=0, noise_sigma=0.0, batch=256, max_rounds=100):
    """``n`` non-empty token lists (EOS stripped) from one generator."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(max_rounds):
        ro, _ = _run(gen, max_len, min(batch, max(n - len(out), 1)), rng=rng, noise_sigma=noise_sigma)
        out.extend(t for t in ro.token_lists(gen.vocab) if t)
        if len(out) >= n:
            return out[:n]
    raise EmptySequence(f"generator produced only {len(out)} non-empty sequences out of {n} requested")


def generate_synthetic_corpus(generators, config=None, seed=None):
    """Sample ``samples_per_label`` narratives from each per-label generator.

    ``generators`` maps label (``False`` non-meritorious, ``True``
    meritorious) to :class:`GeneratorParams`; output lists the
    non-meritorious branch first.
    """
    config = config or GanConfig()
    seed = config.seed if seed is None else seed
    records = []
    for k, label in enumerate(sorted(generators)):
        toks = sample_narratives(generators[label], config.samples_per_label, config.max_len,
                                 seed=[seed, k], noise_sigma=0.0)
        records.extend(SyntheticRecord(t, bool(label)) for t in toks)
    return records


def synthetic_to_records(records):
    return [ComplaintRecord(None, "synthetic", "synthetic", "synthetic", " ".join(r.tokens), None, None, r.label)
            for r in records]


def write_synthetic_corpus(path, records):
    write_corpus(path, synthetic_to_records(records))
