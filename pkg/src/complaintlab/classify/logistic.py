"""L2-regularized logistic regression trained by full-batch gradient descent."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import SingleClassTraining
from ..linalg import log_sigmoid, sigmoid


@dataclass
class LogisticModel:
    weights: np.ndarray  # feature weights followed by the bias
    hyper: dict = field(default_factory=dict)
    losses: list = field(default_factory=list)

    def scores(self, X):
        return sigmoid(np.asarray(X, dtype=np.float64) @ self.weights[:-1] + self.weights[-1])


def _augment(X):
    X = np.asarray(X, dtype=np.float64)
    return np.hstack([X, np.ones((X.shape[0], 1))])


def logistic_loss(w, X, y, l2=0.0):
    """Mean negative log-likelihood plus ``l2/2 * |w|^2`` (bias excluded)."""
    a = _augment(X) @ w
    nll = -np.mean(y * log_sigmoid(a) + (1 - y) * log_sigmoid(-a))
    return float(nll + 0.5 * l2 * np.dot(w[:-1], w[:-1]))


def logistic_grad(w, X, y, l2=0.0):
    Xa = _augment(X)
    g = Xa.T @ (sigmoid(Xa @ w) - y) / len(y)
    g[:-1] += l2 * w[:-1]
    return g


def train_logistic(X, y, lr=1.0, epochs=300, l2=1e-3, seed=0, tol=1e-10):
    """Gradient descent with step halving so the training loss never increases.

    Starts from zero weights; ``seed`` is recorded for provenance only because
    the procedure is deterministic.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if np.unique(y).size < 2:
        raise SingleClassTraining("logistic regression needs both classes in training data")
    w = np.zeros(X.shape[1] + 1)
    loss = logistic_loss(w, X, y, l2)
    losses = [loss]
    step = lr
    for _ in range(epochs):
        g = logistic_grad(w, X, y, l2)
        gnorm2 = float(g @ g)
        if gnorm2 < tol**2:
            break
        while True:
            cand = w - step * g
            cand_loss = logistic_loss(cand, X, y, l2)
            # Armijo sufficient decrease
            if cand_loss <= loss - 1e-4 * step * gnorm2 or step < 1e-12:
                break
            step *= 0.5
        if cand_loss > loss:
            break
        w, loss = cand, cand_loss
        losses.append(loss)
        step = min(step * 2.0, lr)
    hyper = {"lr": lr, "epochs": epochs, "l2": l2, "seed": seed}
    return LogisticModel(w, hyper, losses)
