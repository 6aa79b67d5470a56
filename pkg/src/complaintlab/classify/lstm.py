"""LSTM cell, masked sequence recurrence with backpropagation through time,
and a sequence classifier with a sigmoid readout on the final hidden state.

Gate layout in the stacked weight matrix is ``[input, forget, output, candidate]``:

    i, f, o = sigmoid(W[:, :D] x + W[:, D:] h + b)   (first three blocks)
    g       = tanh(...)                               (fourth block)
    c'      = f * c + i * g
    h'      = o * tanh(c')
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, EmptySequence, SingleClassTraining
from ..featurize import sequence_embeddings
from ..linalg import log_sigmoid, sigmoid


def _sig(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


@dataclass
class LstmParams:
    W: np.ndarray  # 4H x (D + H)
    b: np.ndarray  # 4H

    @property
    def hidden(self):
        return self.b.shape[0] // 4

    @property
    def input_dim(self):
        return self.W.shape[1] - self.hidden

    @classmethod
    def init(cls, input_dim, hidden, rng, forget_bias=1.0):
        scale = 1.0 / np.sqrt(hidden + input_dim)
        W = rng.uniform(-scale, scale, size=(4 * hidden, input_dim + hidden))
        b = np.zeros(4 * hidden)
        b[hidden:2 * hidden] = forget_bias
        return cls(W, b)

    @classmethod
    def zeros(cls, input_dim, hidden):
        return cls(np.zeros((4 * hidden, input_dim + hidden)), np.zeros(4 * hidden))

    def copy(self):
        return LstmParams(self.W.copy(), self.b.copy())


def lstm_step(x, state, params):
    """One cell update; ``x`` is ``(D,)`` or ``(B, D)``, state is ``(h, c)``."""
    h, c = state
    x = np.asarray(x, dtype=np.float64)
    D, H = params.input_dim, params.hidden
    if x.shape[-1] != D or np.shape(h)[-1] != H or np.shape(c)[-1] != H:
        raise DimensionMismatch(f"input {x.shape}, h {np.shape(h)}, c {np.shape(c)} vs D={D}, H={H}")
    z = x @ params.W[:, :D].T + h @ params.W[:, D:].T + params.b
    i, f, o = _sig(z[..., :H]), _sig(z[..., H:2 * H]), _sig(z[..., 2 * H:3 * H])
    g = np.tanh(z[..., 3 * H:])
    c_new = f * c + i * g
    return o * np.tanh(c_new), c_new


class LstmTape:
    """Records a batched, masked forward pass so gradients can be pulled back.

    Rows whose mask is 0 at a step carry their previous ``(h, c)`` unchanged,
    which lets sequences of different lengths share one batch.
    """

    def __init__(self, params, batch):
        self.params = params
        H = params.hidden
        self.h = np.zeros((batch, H))
        self.c = np.zeros((batch, H))
        self.hs = [self.h]
        self._cache = []

    def step(self, x, mask=None):
        p, D, H = self.params, self.params.input_dim, self.params.hidden
        z = x @ p.W[:, :D].T + self.h @ p.W[:, D:].T + p.b
        i, f, o = _sig(z[:, :H]), _sig(z[:, H:2 * H]), _sig(z[:, 2 * H:3 * H])
        g = np.tanh(z[:, 3 * H:])
        c_new = f * self.c + i * g
        tc = np.tanh(c_new)
        h_new = o * tc
        m = np.ones((x.shape[0], 1)) if mask is None else np.asarray(mask, dtype=np.float64)[:, None]
        self._cache.append((x, self.h, self.c, i, f, o, g, tc, m))
        self.c = m * c_new + (1 - m) * self.c
        self.h = m * h_new + (1 - m) * self.h
        self.hs.append(self.h)
        return self.h

    def backward(self, dH):
        """Gradients given ``dH[t] = dL/dh_t`` for ``t = 0..T`` (index 0 ignored).

        Returns ``(dW, db, dX)`` with ``dX`` shaped ``(T, B, D)``.
        """
        p, D = self.params, self.params.input_dim
        Wx, Wh = p.W[:, :D], p.W[:, D:]
        dW = np.zeros_like(p.W)
        db = np.zeros_like(p.b)
        T = len(self._cache)
        dX = np.zeros((T,) + self._cache[0][0].shape) if T else np.zeros((0, 0, D))
        dh_next = np.zeros_like(self.h)
        dc_next = np.zeros_like(self.c)
        for t in range(T - 1, -1, -1):
            x, h_prev, c_prev, i, f, o, g, tc, m = self._cache[t]
            dh = dH[t + 1] + dh_next
            dh_new = m * dh
            dc_new = m * dc_next + dh_new * o * (1 - tc * tc)
            dz = np.hstack([
                dc_new * g * i * (1 - i),
                dc_new * c_prev * f * (1 - f),
                dh_new * tc * o * (1 - o),
                dc_new * i * (1 - g * g),
            ])
            dW[:, :D] += dz.T @ x
            dW[:, D:] += dz.T @ h_prev
            db += dz.sum(axis=0)
            dX[t] = dz @ Wx
            dh_next = dz @ Wh + (1 - m) * dh
            dc_next = dc_new * f + (1 - m) * dc_next
        return dW, db, dX


def lstm_forward(X, mask, params):
    """Run ``X`` shaped ``(T, B, D)`` through the cell; returns the tape."""
    T, B, _ = X.shape
    tape = LstmTape(params, B)
    for t in range(T):
        tape.step(X[t], None if mask is None else mask[t])
    return tape


def pad_batch(seqs, dim):
    """Stack ``(len_i, dim)`` arrays into ``(T, B, dim)`` plus a ``(T, B)`` mask."""
    T = max(len(s) for s in seqs)
    X = np.zeros((T, len(seqs), dim))
    mask = np.zeros((T, len(seqs)))
    for j, s in enumerate(seqs):
        X[:len(s), j] = s
        mask[:len(s), j] = 1.0
    return X, mask


@dataclass
class LstmClassifier:
    cell: LstmParams
    readout: np.ndarray  # H + 1, bias last
    provider: object
    mode: str = "plain"
    tfidf_model: object = None
    hyper: dict = field(default_factory=dict)
    losses: list = field(default_factory=list)

    def embed(self, docs):
        if any(len(d) == 0 for d in docs):
            raise EmptySequence("every sequence needs at least one token")
        return [sequence_embeddings(self.provider, d, self.mode, self.tfidf_model) for d in docs]

    def final_hidden(self, seqs):
        X, mask = pad_batch(seqs, self.cell.input_dim)
        return lstm_forward(X, mask, self.cell).h

    def scores(self, docs, batch_size=256):
        docs = list(docs)
        out = []
        for s in range(0, len(docs), batch_size):
            h = self.final_hidden(self.embed(docs[s:s + batch_size]))
            out.append(sigmoid(h @ self.readout[:-1] + self.readout[-1]))
        return np.concatenate(out)


def sequence_loss_and_grads(cell, readout, seqs, y):
    """Mean binary cross-entropy of the readout on final hidden states, with gradients."""
    X, mask = pad_batch(seqs, cell.input_dim)
    tape = lstm_forward(X, mask, cell)
    h = tape.h
    a = h @ readout[:-1] + readout[-1]
    loss = -np.mean(y * log_sigmoid(a) + (1 - y) * log_sigmoid(-a))
    da = (sigmoid(a) - y) / len(y)
    d_readout = np.concatenate([h.T @ da, [da.sum()]])
    dH = np.zeros((X.shape[0] + 1,) + h.shape)
    dH[-1] = np.outer(da, readout[:-1])
    dW, db, _ = tape.backward(dH)
    return float(loss), dW, db, d_readout


class Adam:
    def __init__(self, shapes, lr=1e-2, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def update(self, params, grads):
        self.t += 1
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.b1
            m += (1 - self.b1) * g
            v *= self.b2
            v += (1 - self.b2) * g * g
            mhat = m / (1 - self.b1 ** self.t)
            vhat = v / (1 - self.b2 ** self.t)
            p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)


def clip_by_norm(grads, max_norm):
    norm = np.sqrt(sum(float(np.sum(g * g)) for g in grads))
    if norm > max_norm:
        grads = [g * (max_norm / norm) for g in grads]
    return grads


def train_lstm_classifier(docs, labels, provider, mode="plain", tfidf_model=None, hidden=64,
                          epochs=10, batch_size=32, lr=1e-2, clip=5.0, seed=0):
    """Seeded mini-batch training (Adam, global-norm clipping) of an LSTM classifier.

    ``docs`` are token lists; inputs are composed token embeddings from
    ``provider`` (IDF-scaled in ``idf_reweighted`` mode).
    """
    y = np.asarray(labels, dtype=np.float64).ravel()
    if np.unique(y).size < 2:
        raise SingleClassTraining("LSTM classifier needs both classes in training data")
    rng = np.random.default_rng(seed)
    cell = LstmParams.init(provider.dim, hidden, rng)
    readout = np.zeros(hidden + 1)
    model = LstmClassifier(cell, readout, provider, mode, tfidf_model,
                           {"hidden": hidden, "epochs": epochs, "batch_size": batch_size,
                            "lr": lr, "clip": clip, "seed": seed})
    docs = list(docs)
    if any(len(d) == 0 for d in docs):
        raise EmptySequence("every sequence needs at least one token")
    opt = Adam([cell.W.shape, cell.b.shape, readout.shape], lr=lr)
    for _ in range(epochs):
        order = rng.permutation(len(docs))
        total = 0.0
        for s in range(0, len(order), batch_size):
            idx = order[s:s + batch_size]
            seqs = model.embed([docs[i] for i in idx])
            loss, dW, db, dr = sequence_loss_and_grads(cell, readout, seqs, y[idx])
            total += loss * len(idx)
            opt.update([cell.W, cell.b, readout], clip_by_norm([dW, db, dr], clip))
        model.losses.append(total / len(docs))
    return model
