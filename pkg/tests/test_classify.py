import numpy as np
import pytest

from complaintlab.classify import (FEATURE_MODES, ForestModel, LogisticModel, LstmParams, SplitConfig,
                                   check_compatibility, lstm_step, predict, split_indices, train_forest,
                                   train_logistic, train_lstm_classifier, train_test_split)
from complaintlab.classify.forest import Tree, fit_tree
from complaintlab.classify.logistic import logistic_grad, logistic_loss
from complaintlab.classify.lstm import LstmTape, clip_by_norm, sequence_loss_and_grads
from complaintlab.classify.persist import load_model, save_model
from complaintlab.errors import (ConfigError, DataError, DegenerateSplit, FeatureModelMismatch,
                                 SingleClassTraining)
from complaintlab.featurize import HashEmbeddingProvider, fit_tfidf, sequence_embeddings

from oracles import central_difference, rel_error


def blobs(n=100, seed=0):
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 2
    X = np.where(y[:, None] == 1, 2.0, -2.0) + rng.standard_normal((n, 2)) * 0.7
    return X, y


# splitting

def test_split_sizes_and_disjoint():
    tr, te = split_indices(10, SplitConfig(0.2, seed=1))
    assert len(tr) == 8 and len(te) == 2
    assert set(tr).isdisjoint(te) and set(tr) | set(te) == set(range(10))


def test_split_deterministic():
    a = train_test_split(list("abcdefghij"), SplitConfig(0.3, seed=5))
    b = train_test_split(list("abcdefghij"), SplitConfig(0.3, seed=5))
    assert a == b


def test_split_rounding_on_three():
    tr, te = split_indices(3, SplitConfig(0.5))
    assert sorted([len(tr), len(te)]) == [1, 2]


def test_split_errors():
    with pytest.raises(ValueError):
        SplitConfig(1.0)
    with pytest.raises(DegenerateSplit):
        split_indices(1, SplitConfig())
    with pytest.raises(DegenerateSplit):
        split_indices(2, SplitConfig(0.1))


# logistic regression

def test_logistic_separates_blobs():
    X, y = blobs()
    model = train_logistic(X, y)
    labels, _ = predict(model, X)
    assert np.mean(labels == y) >= 0.99
    assert all(b <= a + 1e-15 for a, b in zip(model.losses, model.losses[1:]))


def test_logistic_single_class():
    with pytest.raises(SingleClassTraining):
        train_logistic(np.ones((4, 2)), np.zeros(4))


def test_logistic_gradient_at_zero():
    X, y = blobs(20, seed=3)
    w = np.zeros(3)
    closed = np.concatenate([X.T @ (0.5 - y), [np.sum(0.5 - y)]]) / len(y)
    assert np.allclose(logistic_grad(w, X, y, l2=0.1), closed, atol=1e-15)


def test_logistic_gradient_finite_differences():
    rng = np.random.default_rng(4)
    X, y = rng.standard_normal((30, 5)), rng.integers(0, 2, 30)
    w = rng.standard_normal(6)
    fd = central_difference(lambda v: logistic_loss(v, X, y, l2=0.3), w)
    assert rel_error(logistic_grad(w, X, y, l2=0.3), fd) < 1e-6


def test_logistic_threshold_is_inclusive():
    model = LogisticModel(np.zeros(3))
    labels, scores = predict(model, np.ones((2, 2)))
    assert scores.tolist() == [0.5, 0.5] and labels.tolist() == [1, 1]


# forest

def test_tree_threshold_fixture():
    x = np.linspace(-1, 1, 40)
    x = x[x != 0]
    X, y = x[:, None], (x >= 0).astype(int)
    model = train_forest(X, y, n_trees=5, seed=0)
    assert np.mean(model.predict(X) == y) == 1.0
    tree = fit_tree(X, y, rng=np.random.default_rng(0))
    assert tree.depth == 1


def test_depth_zero_stump_predicts_majority():
    X, y = blobs(31)
    model = train_forest(X, y, n_trees=1, max_depth=0, bootstrap=False)
    majority = int(2 * y.sum() > len(y))
    assert set(model.predict(X).tolist()) == {majority}


def test_forest_deterministic():
    X, y = blobs(60, seed=2)
    a, b = train_forest(X, y, n_trees=7, seed=3), train_forest(X, y, n_trees=7, seed=3)
    assert np.array_equal(a.votes(X), b.votes(X))
    for ta, tb in zip(a.trees, b.trees):
        assert np.array_equal(ta.feature, tb.feature) and np.array_equal(ta.threshold, tb.threshold)


def test_forest_tie_goes_to_class_zero():
    leaf = lambda v: Tree(np.array([-1]), np.array([0.0]), np.array([-1]), np.array([-1]), np.array([v]))
    model = ForestModel([leaf(1), leaf(0)])
    labels, scores = predict(model, np.zeros((3, 2)))
    assert scores.tolist() == [0.5] * 3 and labels.tolist() == [0, 0, 0]


def test_forest_single_class():
    with pytest.raises(SingleClassTraining):
        train_forest(np.ones((4, 2)), np.ones(4))


# lstm

def test_zero_parameter_cell():
    p = LstmParams.zeros(3, 2)
    c_prev = np.array([0.4, -2.0])
    h, c = lstm_step(np.array([1.0, -1.0, 2.0]), (np.zeros(2), c_prev), p)
    assert np.allclose(c, 0.5 * c_prev, atol=1e-15)
    assert np.allclose(h, 0.5 * np.tanh(0.5 * c_prev), atol=1e-15)


def test_first_step_depends_only_on_input():
    p = LstmParams.init(3, 4, np.random.default_rng(0))
    x = np.array([0.1, 0.2, 0.3])
    h1, c1 = lstm_step(x, (np.zeros(4), np.zeros(4)), p)
    tape = LstmTape(p, 1)
    tape.step(x[None, :])
    assert np.allclose(tape.h[0], h1) and np.allclose(tape.c[0], c1)
    assert np.all(np.abs(h1) < 1)


def test_lstm_gradients_finite_differences():
    rng = np.random.default_rng(1)
    cell = LstmParams.init(3, 4, rng)
    cell.b += 0.1 * rng.standard_normal(cell.b.shape)
    readout = rng.standard_normal(5)
    seqs = [rng.standard_normal((2, 3)), rng.standard_normal((1, 3)), rng.standard_normal((2, 3))]
    y = np.array([1.0, 0.0, 1.0])
    _, dW, db, dr = sequence_loss_and_grads(cell, readout, seqs, y)

    def loss_w(W):
        return sequence_loss_and_grads(LstmParams(W, cell.b), readout, seqs, y)[0]

    def loss_b(b):
        return sequence_loss_and_grads(LstmParams(cell.W, b), readout, seqs, y)[0]

    def loss_r(r):
        return sequence_loss_and_grads(cell, r, seqs, y)[0]

    assert rel_error(dW, central_difference(loss_w, cell.W)) < 1e-4
    assert rel_error(db, central_difference(loss_b, cell.b)) < 1e-4
    assert rel_error(dr, central_difference(loss_r, readout)) < 1e-4


def test_clip_by_norm():
    g = clip_by_norm([np.array([3.0]), np.array([4.0])], 1.0)
    assert np.allclose([g[0][0], g[1][0]], [0.6, 0.8])
    g = clip_by_norm([np.array([0.3])], 1.0)
    assert g[0][0] == 0.3


def refund_corpus(n=200, seed=0, length=10):
    rng = np.random.default_rng(seed)
    pool = "bank fee card account late loan statement interest".split()
    docs, labels = [], []
    for i in range(n):
        doc = list(rng.choice(pool, size=length))
        if i % 2:
            doc[int(rng.integers(length))] = "refund"
        docs.append(doc)
        labels.append(i % 2)
    return docs, np.array(labels)


def test_lstm_learns_marker_token():
    docs, y = refund_corpus(200)
    provider = HashEmbeddingProvider(16, seed=0)
    tr, te = split_indices(len(docs), SplitConfig(0.2, seed=0))
    model = train_lstm_classifier([docs[i] for i in tr], y[tr], provider, hidden=16, epochs=15, seed=0)
    labels, _ = predict(model, [docs[i] for i in te])
    assert np.mean(labels == y[te]) >= 0.95


def test_single_token_lstm_close_to_logistic():
    # token labels follow a linear rule on the embedding, so both models can represent it
    rng = np.random.default_rng(5)
    provider = HashEmbeddingProvider(16, seed=1)
    vocab = [f"t{i}" for i in range(60)]
    u = rng.standard_normal(16)
    label_of = {w: int(provider.token_vector(w) @ u > 0) for w in vocab}
    docs = [[vocab[int(rng.integers(60))]] for _ in range(300)]
    y = np.array([label_of[d[0]] if rng.random() < 0.9 else 1 - label_of[d[0]] for d in docs])
    tr, te = split_indices(len(docs), SplitConfig(0.3, seed=0))
    X = np.stack([sequence_embeddings(provider, d)[0] for d in docs])
    lr_acc = np.mean(predict(train_logistic(X[tr], y[tr], l2=1e-3), X[te])[0] == y[te])
    model = train_lstm_classifier([docs[i] for i in tr], y[tr], provider, hidden=16, epochs=40, seed=0)
    lstm_acc = np.mean(predict(model, [docs[i] for i in te])[0] == y[te])
    assert abs(lstm_acc - lr_acc) <= 0.03


def test_lstm_deterministic():
    docs, y = refund_corpus(40)
    p = HashEmbeddingProvider(8)
    a = train_lstm_classifier(docs, y, p, hidden=4, epochs=2, seed=9)
    b = train_lstm_classifier(docs, y, p, hidden=4, epochs=2, seed=9)
    assert np.array_equal(a.cell.W, b.cell.W) and np.array_equal(a.readout, b.readout)


def test_matrix_into_lstm_rejected():
    docs, y = refund_corpus(20)
    model = train_lstm_classifier(docs, y, HashEmbeddingProvider(8), hidden=4, epochs=1)
    with pytest.raises(FeatureModelMismatch):
        predict(model, np.ones((3, 8)))
    with pytest.raises(FeatureModelMismatch):
        predict(train_logistic(*blobs(10)), docs)


def test_compatibility_rule():
    for mode in FEATURE_MODES:
        for clf in ("lr", "rf"):
            check_compatibility(mode, clf)
    check_compatibility("embed_idf", "lstm")
    for mode in ("tfidf", "truncated_tfidf"):
        with pytest.raises(FeatureModelMismatch):
            check_compatibility(mode, "lstm")
    with pytest.raises(ConfigError):
        check_compatibility("bag", "lr")


# persistence

def test_persist_roundtrip_all_kinds(tmp_path):
    X, y = blobs(40)
    docs, yd = refund_corpus(30)
    tfidf = fit_tfidf(docs)
    models = [
        (train_logistic(X, y), X),
        (train_forest(X, y, n_trees=5, seed=1), X),
        (train_lstm_classifier(docs, yd, HashEmbeddingProvider(8, seed=2), mode="idf_reweighted",
                               tfidf_model=tfidf, hidden=4, epochs=1), docs),
    ]
    for k, (model, inputs) in enumerate(models):
        path = tmp_path / f"m{k}.bin"
        save_model(path, model)
        back = load_model(path)
        assert type(back) is type(model)
        assert np.array_equal(predict(back, inputs)[1], predict(model, inputs)[1])
        save_model(tmp_path / f"again{k}.bin", back)
        assert (tmp_path / f"again{k}.bin").read_bytes() == path.read_bytes()


def test_persist_rejects_garbage(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"not a model")
    with pytest.raises(DataError):
        load_model(path)
