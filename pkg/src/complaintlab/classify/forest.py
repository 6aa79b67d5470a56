"""Random forest of CART trees (Gini impurity, bootstrap rows, sqrt(d) features per split)."""

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import SingleClassTraining

LEAF = -1


@dataclass
class Tree:
    """Flat array tree. ``feature[k] == LEAF`` marks a leaf whose vote is ``value[k]``."""
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # majority class at the node (0/1)

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            idx = np.nonzero(active)[0]
            k = node[idx]
            go_left = X[idx, self.feature[k]] <= self.threshold[k]
            node[idx] = np.where(go_left, self.left[k], self.right[k])
            active = self.feature[node] != LEAF
        return self.value[node]

    @property
    def depth(self):
        depth = np.zeros(len(self.feature), dtype=int)
        for k in range(len(self.feature)):
            if self.feature[k] != LEAF:
                depth[self.left[k]] = depth[self.right[k]] = depth[k] + 1
        return int(depth.max())


@dataclass
class ForestModel:
    trees: list
    hyper: dict = field(default_factory=dict)

    def votes(self, X):
        return np.mean([t.predict(X) for t in self.trees], axis=0)

    def scores(self, X):
        return self.votes(X)

    def predict(self, X):
        # strict majority for class 1; ties go to class 0
        return (self.votes(X) > 0.5).astype(int)


def _majority(y):
    return int(2 * y.sum() > len(y))


def _best_split(Xn, yn, min_leaf):
    """Lowest weighted Gini over all thresholds of the given columns.

    Returns ``(column, threshold, impurity)`` or ``None``.
    """
    n = len(yn)
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    ys = yn[order]
    left_pos = np.cumsum(ys, axis=0)[:-1]
    total_pos = ys.sum(axis=0)
    n_left = np.arange(1, n)[:, None]
    n_right = n - n_left
    p_l = left_pos / n_left
    p_r = (total_pos - left_pos) / n_right
    gini = (n_left * 2 * p_l * (1 - p_l) + n_right * 2 * p_r * (1 - p_r)) / n
    valid = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    gini = np.where(valid, gini, np.inf)
    flat = int(np.argmin(gini))
    i, j = divmod(flat, gini.shape[1])
    thr = 0.5 * (xs[i, j] + xs[i + 1, j])
    if not thr < xs[i + 1, j]:  # midpoint rounded up onto the right value
        thr = xs[i, j]
    return j, thr, gini[i, j]


def fit_tree(X, y, max_depth=12, min_leaf=2, max_features=None, rng=None):
    rng = rng or np.random.default_rng(0)
    n, d = X.shape
    m = d if max_features is None else max(1, min(d, max_features))
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(_majority(y[idx]))
        return len(feature) - 1

    stack = [(new_node(np.arange(n)), np.arange(n), 0)]
    while stack:
        k, idx, depth = stack.pop()
        yn = y[idx]
        pos = yn.sum()
        if depth >= max_depth or pos == 0 or pos == len(yn) or len(idx) < 2 * min_leaf:
            continue
        cols = np.sort(rng.choice(d, size=m, replace=False)) if m < d else np.arange(d)
        best = _best_split(X[np.ix_(idx, cols)], yn, min_leaf)
        if best is None:
            continue
        j, thr, imp = best
        p = pos / len(yn)
        if imp >= 2 * p * (1 - p) - 1e-15:
            continue
        col = cols[j]
        mask = X[idx, col] <= thr
        li, ri = idx[mask], idx[~mask]
        feature[k], threshold[k] = int(col), float(thr)
        left[k], right[k] = new_node(li), new_node(ri)
        stack.append((right[k], ri, depth + 1))
        stack.append((left[k], li, depth + 1))
    return Tree(np.array(feature), np.array(threshold, dtype=np.float64),
                np.array(left), np.array(right), np.array(value))


def train_forest(X, y, n_trees=100, max_depth=12, min_leaf=2, seed=0, max_features="sqrt", bootstrap=True):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y).astype(int).ravel()
    if np.unique(y).size < 2:
        raise SingleClassTraining("random forest needs both classes in training data")
    n, d = X.shape
    m = max(1, int(math.sqrt(d))) if max_features == "sqrt" else max_features
    trees = []
    for child in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.default_rng(child)
        rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        trees.append(fit_tree(X[rows], y[rows], max_depth, min_leaf, m, rng))
    hyper = {"n_trees": n_trees, "max_depth": max_depth, "min_leaf": min_leaf, "seed": seed,
             "max_features": m, "bootstrap": bootstrap}
    return ForestModel(trees, hyper)
