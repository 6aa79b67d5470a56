import numpy as np
import pytest

from complaintlab.classify import SplitConfig
from complaintlab.config import ClassifierConfig, FeatureConfig
from complaintlab.errors import ConfigError, DataError, EmptyCorpus, FeatureModelMismatch
from complaintlab.featurize import tfidf_matrix
from complaintlab.fixtures import desk_corpus_csv
from complaintlab.generate.gan import SyntheticRecord, synthetic_to_records
from complaintlab.ingest import FilterConfig, filter_records, parse_complaints_csv
from complaintlab.linalg import write_dense
from complaintlab.pipeline import FeatureBuilder, corpus_from_records, make_builder, run_experiment, split_corpus


@pytest.fixture(scope="module")
def splits():
    raw = parse_complaints_csv(desk_corpus_csv(400, seed=5))
    corpus = corpus_from_records(filter_records(raw, FilterConfig(min_category_frequency=1)))
    return corpus, *split_corpus(corpus, SplitConfig(0.25, seed=0))


def test_corpus_drops_tokenless_records(splits, caplog):
    corpus = splits[0]
    rec = corpus.records[0]
    blank = type(rec)(**{**rec.__dict__, "narrative": "... !!!"})
    c = corpus_from_records([blank, rec])
    assert len(c) == 1 and c.rows.tolist() == [1]
    assert "dropped 1" in caplog.text
    with pytest.raises(EmptyCorpus):
        corpus_from_records([blank])


@pytest.mark.parametrize("mode", ["tfidf", "truncated_tfidf", "embed_plain", "embed_idf"])
def test_feature_shapes_and_train_statistics(splits, mode):
    _, train, test = splits
    b = FeatureBuilder(FeatureConfig(mode=mode, k=16, embed_dim=12)).fit(train)
    Xtr, Xte = b.transform(train), b.transform(test)
    assert Xtr.shape[0] == len(train) and Xte.shape == (len(test), Xtr.shape[1])
    # standardized on the training rows only
    assert np.allclose(Xtr.mean(axis=0), 0, atol=1e-9)
    dummies = 4 + 4 + 5
    text_width = {"tfidf": len(b.tfidf.vocab), "truncated_tfidf": 16}.get(mode, 12)
    assert Xtr.shape[1] == dummies + 1 + text_width


def test_truncated_test_rows_fold_into_training_basis(splits):
    _, train, test = splits
    b = FeatureBuilder(FeatureConfig(mode="truncated_tfidf", k=16, metadata=False)).fit(train)
    raw = b._text(test)
    assert np.allclose(raw, tfidf_matrix(b.tfidf, test.docs) @ b.basis)


def test_metadata_off_for_synthetic_training(splits, caplog):
    _, _, test = splits
    synth = corpus_from_records(synthetic_to_records(
        [SyntheticRecord(["refund", "fee", "bank"], True), SyntheticRecord(["policy", "terms"], False)] * 5))
    b = FeatureBuilder(FeatureConfig(mode="tfidf")).fit(synth)
    assert b.metadata is False and "lack dollar values" in caplog.text
    assert b.transform(test).shape == (len(test), len(b.tfidf.vocab))


def test_evaluation_needs_metadata_when_training_had_it(splits):
    _, train, _ = splits
    synth = corpus_from_records(synthetic_to_records([SyntheticRecord(["fee", "bank"], True)] * 2))
    b = FeatureBuilder(FeatureConfig()).fit(train)
    with pytest.raises(DataError):
        b.transform(synth)


def test_builder_preconditions(tmp_path):
    with pytest.raises(FeatureModelMismatch):
        make_builder(FeatureConfig(mode="tfidf"), ClassifierConfig(name="lstm"))
    write_dense(tmp_path / "e.txt", np.zeros((2, 2)))
    with pytest.raises(ConfigError):
        make_builder(FeatureConfig(mode="tfidf"), ClassifierConfig(), tmp_path / "e.txt")
    with pytest.raises(ConfigError):
        make_builder(FeatureConfig(mode="embed_plain"), ClassifierConfig(name="lstm"), tmp_path / "e.txt")


def test_embedding_file_too_short(splits, tmp_path):
    _, train, _ = splits
    write_dense(tmp_path / "e.txt", np.zeros((3, 4)))
    b = make_builder(FeatureConfig(mode="embed_plain"), ClassifierConfig(), tmp_path / "e.txt")
    with pytest.raises(DataError):
        b.fit(train)


@pytest.mark.parametrize("clf,mode", [("lr", "tfidf"), ("rf", "truncated_tfidf"), ("lstm", "embed_idf")])
def test_run_experiment_is_deterministic(splits, clf, mode):
    _, train, test = splits
    f = FeatureConfig(mode=mode, k=16, embed_dim=12)
    c = ClassifierConfig(name=clf, lr_l2=0.1, rf_n_trees=10, lstm_hidden=8, lstm_epochs=2)
    a, b = run_experiment(train, test, f, c), run_experiment(train, test, f, c)
    assert a.report == b.report and np.array_equal(a.predictions, b.predictions)
    assert a.report.accuracy > 0.6


def test_embed_idf_with_unit_idf_equals_plain(splits):
    _, train, _ = splits
    texts = []
    for mode in ("embed_plain", "embed_idf"):
        b = FeatureBuilder(FeatureConfig(mode=mode, embed_dim=12)).fit(train)
        b.tfidf.idf[:] = 1.0
        texts.append(b._text(train))
    assert np.array_equal(texts[0], texts[1])
