"""Acceptance gate. Each test prints one PASS/FAIL line with its measured values
and runtime, then asserts both the property and the runtime budget."""

import filecmp
import io
import os
import time
from timeit import repeat

import numpy as np
from scipy.stats import spearmanr

from complaintlab.classify import SplitConfig, predict
from complaintlab.classify.logistic import logistic_grad, logistic_loss
from complaintlab.classify.lstm import LstmParams, sequence_loss_and_grads, train_lstm_classifier
from complaintlab.cli import main
from complaintlab.config import ClassifierConfig, FeatureConfig
from complaintlab.featurize import HashEmbeddingProvider
from complaintlab.fixtures import desk_corpus_csv, toy_gan_setup
from complaintlab.generate import (GanConfig, bigram_generate, fit_bigram, gan_value, gan_value_grad,
                                   generate_synthetic_corpus, train_gan)
from complaintlab.generate.gan import (enumerate_sequences, expected_generator_objective, init_generator,
                                       score_function_gradient, sequence_log_probs)
from complaintlab.ingest import FilterConfig, filter_records, parse_complaints_csv
from complaintlab.linalg import truncated_svd
from complaintlab.metrics import ConfusionCounts, evaluate_all, kappa_from_agreement, kappa_from_counts, mcc
from complaintlab.pipeline import corpus_from_records, run_experiment, split_corpus
from complaintlab.text import Vocabulary, cosine_similarity, count_vector, tokenize

from oracles import brute_metrics, central_difference, jacobi_svd, rel_error


def verdict(capsys, n, ok, elapsed, limit, detail):
    budget = "no fixed limit" if limit is None else f"limit {limit:g} s"
    within = limit is None or elapsed < limit
    line = f"criterion {n}: {'PASS' if ok and within else 'FAIL'} ({elapsed:.3f} s, {budget}) {detail}"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line
    assert within, line


def best_time(fn, number=1, runs=5):
    return min(repeat(fn, number=number, repeat=runs)) / number


def test_criterion_1_cosine_worked_example(capsys):
    original = "unexpected fees charged to my credit account and inaccurate statements"
    summary = "unexpected fees and inaccurate credit statements"

    def compute():
        a, b = tokenize(original), tokenize(summary)
        vocab = Vocabulary(a + b)
        return cosine_similarity(count_vector(a, vocab), count_vector(b, vocab))

    value = compute()
    elapsed = best_time(compute, number=100)
    verdict(capsys, 1, abs(value - 0.775) <= 0.001, elapsed, 1e-3, f"cosine={value:.6f}")


def test_criterion_2_bigram_fidelity(capsys):
    sentence = "unexpected fees and inaccurate credit statements".split()
    expected = list(zip(sentence, sentence[1:]))

    def compute():
        model = fit_bigram([sentence])
        return model.table(), bigram_generate(model, "unexpected", len(sentence), seed=0)

    table, generated = compute()
    ok = ([pair for pair, _, _ in table] == expected and all(f == 1 and p == 1.0 for _, f, p in table)
          and generated == sentence)
    elapsed = best_time(compute, number=100)
    verdict(capsys, 2, ok, elapsed, 1e-3, f"bigrams={len(table)} generated={' '.join(generated)!r}")


def test_criterion_3_metric_formulas(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    checks = {
        "perfect": mcc(ConfusionCounts(tp=40, fp=0, tn=60, fn=0)) == 1.0,
        "balanced": mcc(ConfusionCounts(25, 25, 25, 25)) == 0.0,
        "disagreement": mcc(ConfusionCounts(tp=0, fp=30, tn=0, fn=20)) == -1.0,
        "kappa": abs(kappa_from_agreement(0.7, 0.5) - 0.4) < 1e-12,
    }
    worst_identity = 0.0
    for _ in range(1000):
        a, b = (int(v) for v in rng.integers(0, 1000, 2))
        if a + b == 0:
            b = 1
        c = ConfusionCounts(tp=a, fp=b, tn=a, fn=b)
        worst_identity = max(worst_identity, abs(mcc(c) - kappa_from_counts(c)))
    worst_oracle = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 120))
        y = rng.integers(0, 2, n)
        p = np.where(rng.random(n) < rng.random(), y, rng.integers(0, 2, n))
        r, ref = evaluate_all(y, p), brute_metrics(y, p)
        worst_oracle = max(worst_oracle, *(abs(getattr(r, k) - ref[k]) for k in ref))
    elapsed = time.perf_counter() - t0
    ok = all(checks.values()) and worst_identity <= 1e-12 and worst_oracle <= 1e-12
    verdict(capsys, 3, ok, elapsed, 5, f"fixtures={checks} mcc-kappa max gap={worst_identity:.1e} "
                                       f"oracle max gap={worst_oracle:.1e}")


def test_criterion_4_svd_quality(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst_ratio, losses = 0.0, 0
    for trial in range(50):
        A = rng.standard_normal((20, 15))
        U, s, Vt = jacobi_svd(A)
        exact = np.linalg.norm(A - (U[:, :5] * s[:5]) @ Vt[:5])
        got = np.linalg.norm(A - truncated_svd(A, 5, seed=trial).reconstruct())
        worst_ratio = max(worst_ratio, got / exact)
        for _ in range(20):
            # best approximation of A inside a random rank-5 column space
            Q, _ = np.linalg.qr(rng.standard_normal((20, 5)))
            if np.linalg.norm(A - Q @ (Q.T @ A)) <= got:
                losses += 1
    elapsed = time.perf_counter() - t0
    verdict(capsys, 4, worst_ratio <= 1.05 and losses == 0, elapsed, 10,
            f"worst error ratio={worst_ratio:.4f} random factorizations beating it={losses}/1000")


def test_criterion_5_gradient_checks(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    X, y = rng.standard_normal((40, 6)), rng.integers(0, 2, 40)
    w = rng.standard_normal(7)
    lr_err = rel_error(logistic_grad(w, X, y, 0.1), central_difference(lambda v: logistic_loss(v, X, y, 0.1), w))

    cell = LstmParams.init(4, 3, rng)
    readout = rng.standard_normal(4)
    seqs = [rng.standard_normal((3, 4)), rng.standard_normal((2, 4))]
    labels = np.array([1.0, 0.0])
    _, dW, db, _ = sequence_loss_and_grads(cell, readout, seqs, labels)
    fd_W = central_difference(lambda W: sequence_loss_and_grads(LstmParams(W, cell.b), readout, seqs, labels)[0],
                              cell.W)
    fd_b = central_difference(lambda b: sequence_loss_and_grads(LstmParams(cell.W, b), readout, seqs, labels)[0],
                              cell.b)
    lstm_err = max(rel_error(dW, fd_W), rel_error(db, fd_b))

    real, fake = rng.uniform(-1, 1, (8, 5)), rng.uniform(-1, 1, (6, 5))
    phi = rng.standard_normal(6)
    d_err = rel_error(gan_value_grad(real, fake, phi), central_difference(lambda p: gan_value(real, fake, p), phi))

    gen = init_generator(["fee", "bank"], HashEmbeddingProvider(3, seed=1), 2, rng, psi_scale=0.5)
    frozen = gen.copy()
    phi_g = rng.standard_normal(3)
    seqs_g = enumerate_sequences(gen, 2)
    lp, _ = sequence_log_probs(gen, seqs_g)
    _, _, dpsi = score_function_gradient(gen, phi_g, seqs_g, np.exp(lp), encoder=frozen)

    def objective(psi):
        g = gen.copy()
        g.psi = psi
        return expected_generator_objective(g, phi_g, 2, encoder=frozen)

    g_err = rel_error(dpsi, central_difference(objective, gen.psi))
    elapsed = time.perf_counter() - t0
    ok = lr_err < 1e-6 and lstm_err < 1e-4 and d_err < 1e-6 and g_err < 1e-6 and len(seqs_g) <= 9
    verdict(capsys, 5, ok, elapsed, 30,
            f"logistic={lr_err:.1e} lstm={lstm_err:.1e} discriminator={d_err:.1e} "
            f"generator={g_err:.1e} over {len(seqs_g)} rollouts")


def desk_splits(**kw):
    raw = parse_complaints_csv(io.BytesIO(desk_corpus_csv(2000, 7, **kw)))
    corpus = corpus_from_records(filter_records(raw, FilterConfig(min_category_frequency=1)))
    return split_corpus(corpus, SplitConfig(0.2, seed=0))


def test_criterion_6_desk_grid(capsys):
    t0 = time.perf_counter()
    train, test = desk_splits()
    cells = [(m, c) for m in ("tfidf", "truncated_tfidf", "embed_plain", "embed_idf") for c in ("lr", "rf")]
    cells += [("embed_plain", "lstm"), ("embed_idf", "lstm")]
    reports = {}
    for mode, clf in cells:
        f = FeatureConfig(mode=mode, k=128, embed_dim=64)
        c = ClassifierConfig(name=clf, lr_l2=0.1, rf_n_trees=100, lstm_hidden=32, lstm_epochs=5)
        reports[mode, clf] = run_experiment(train, test, f, c).report
    elapsed = time.perf_counter() - t0
    full, trunc = reports["tfidf", "lr"].accuracy, reports["truncated_tfidf", "lr"].accuracy
    acc = [r.accuracy for r in reports.values()]
    rho = {m: spearmanr(acc, [getattr(r, m) for r in reports.values()])[0] for m in ("f1", "mcc", "kappa")}
    ok_a, ok_b = full >= 0.90, abs(full - trunc) <= 0.03
    ok_c = all(abs(v - 1.0) < 1e-12 for v in rho.values())
    grid = " ".join(f"{m}/{c}={100 * r.accuracy:.2f}" for (m, c), r in reports.items())
    verdict(capsys, 6, ok_a and ok_b and ok_c, elapsed, 120,
            f"(a) tfidf lr={100 * full:.2f}% (b) truncated={100 * trunc:.2f}% gap={100 * abs(full - trunc):.2f}pp "
            f"(c) spearman={ {k: round(float(v), 6) for k, v in rho.items()} } grid: {grid}")


def test_criterion_7_gan_equilibrium(capsys):
    t0 = time.perf_counter()
    docs, provider, config = toy_gan_setup()
    _, _, history = train_gan(docs, provider, config)
    elapsed = time.perf_counter() - t0
    first, last = history.rows[0], history.rows[-1]
    ok = (len(history.rows) == 300 and 0.35 <= last["d_accuracy"] <= 0.65
          and last["js_divergence"] < first["js_divergence"])
    verdict(capsys, 7, ok, elapsed, 180,
            f"final d_accuracy={last['d_accuracy']:.3f} js epoch1={first['js_divergence']:.4f} "
            f"epoch{last['epoch']}={last['js_divergence']:.4f}")


def test_criterion_8_real_vs_synthetic(capsys):
    t0 = time.perf_counter()
    train, test = desk_splits(lean=1.0)
    provider = HashEmbeddingProvider(dim=32, seed=0)
    real_model = train_lstm_classifier(train.docs, train.labels, provider, hidden=32, epochs=5, seed=0)
    real = evaluate_all(test.labels, predict(real_model, test.docs)[0])
    config = GanConfig(max_len=30, hidden=32, epochs=100, batch_size=256, g_lr=0.003, cell_lr_scale=0.0,
                       min_count=30, samples_per_label=800, seed=0)
    generators = {}
    for label in (False, True):
        docs = [d for d, y in zip(train.docs, train.labels) if bool(y) == label]
        generators[label] = train_gan(docs, provider, config)[0]
    synthetic = generate_synthetic_corpus(generators, config, seed=0)
    syn_model = train_lstm_classifier([s.tokens for s in synthetic], [int(s.label) for s in synthetic], provider,
                                      hidden=32, epochs=5, seed=0)
    syn = evaluate_all(test.labels, predict(syn_model, test.docs)[0])
    elapsed = time.perf_counter() - t0
    a, b = real.percentages(), syn.percentages()
    gaps = {k: round(abs(a[k] - b[k]), 2) for k in a}
    verdict(capsys, 8, all(g <= 10 for g in gaps.values()), elapsed, 180,
            f"real={a} synthetic={b} gaps(pp)={gaps}")


CLI_CONFIG = """\
paths.input = {input}
filter.min_category_frequency = 1
features.k = 32
features.embed_dim = 16
lr.l2 = 0.1
lr.epochs = 100
rf.n_trees = 10
lstm.hidden = 8
lstm.epochs = 2
gan.hidden = 8
gan.max_len = 16
gan.epochs = 5
gan.batch_size = 32
gan.samples_per_label = 60
gan.min_count = 5
gan.cell_lr_scale = 0.0
"""

CLI_SCRIPT = [
    ["ingest"],
    ["summarize", "--max-words", "10"],
    *[["featurize", "--mode", m] for m in ("tfidf", "truncated_tfidf", "embed_plain", "embed_idf")],
    *[[cmd, "--mode", m, "--classifier", c] for m, c in (("tfidf", "lr"), ("truncated_tfidf", "rf"),
                                                         ("embed_idf", "lr"), ("embed_plain", "lstm"))
      for cmd in ("train", "eval")],
    ["generate"],
    ["train", "--source", "synthetic", "--mode", "embed_plain", "--classifier", "lstm"],
    ["eval", "--source", "synthetic", "--mode", "embed_plain", "--classifier", "lstm"],
    ["compare", "--mode", "embed_plain", "--classifier", "lstm"],
    ["print-config"],
]


def test_criterion_9_cli_determinism(tmp_path, capsys):
    t0 = time.perf_counter()
    (tmp_path / "desk.csv").write_bytes(desk_corpus_csv(300, seed=11))
    cfg = tmp_path / "run.cfg"
    cfg.write_text(CLI_CONFIG.format(input=tmp_path / "desk.csv"))
    codes, outputs = [], []
    for run in ("a", "b"):
        workdir = tmp_path / run
        for argv in CLI_SCRIPT:
            codes.append(main([argv[0], "--config", str(cfg), "--workdir", str(workdir), "--seed", "1", *argv[1:]]))
        outputs.append(capsys.readouterr().out.replace(str(workdir), "<workdir>"))
    names = sorted(os.listdir(tmp_path / "a"))
    match, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", names, shallow=False)
    elapsed = time.perf_counter() - t0
    ok = (all(c == 0 for c in codes) and names == sorted(os.listdir(tmp_path / "b"))
          and not mismatch and not errors and outputs[0] == outputs[1] and len(names) >= 15)
    verdict(capsys, 9, ok, elapsed, None,
            f"{len(match)} artifacts identical, differing={mismatch + errors}, exit codes={sorted(set(codes))}")
