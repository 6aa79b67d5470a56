"""
Featurization modes against three classifiers
=============================================

A bundled synthetic complaint corpus (2,000 narratives, two outcomes with
different word distributions) is filtered, split and run through every
compatible featurization and classifier pair. Bag-of-words modes never feed
the LSTM. Takes about half a minute.
"""

from complaintlab.classify import SplitConfig
from complaintlab.config import ClassifierConfig, FeatureConfig
from complaintlab.fixtures import desk_corpus_csv
from complaintlab.ingest import FilterConfig, filter_records, parse_complaints_csv
from complaintlab.pipeline import corpus_from_records, run_experiment, split_corpus

raw = parse_complaints_csv(desk_corpus_csv(2000, seed=7))
records = filter_records(raw, FilterConfig(min_category_frequency=1))
corpus = corpus_from_records(records)
train, test = split_corpus(corpus, SplitConfig(0.2, seed=0))
print(len(train), "training and", len(test), "test narratives")

cells = [(m, c) for m in ("tfidf", "truncated_tfidf", "embed_plain", "embed_idf") for c in ("lr", "rf")]
cells += [("embed_plain", "lstm"), ("embed_idf", "lstm")]
print("%-16s %-5s %8s %8s %8s %8s" % ("mode", "model", "acc", "f1", "mcc", "kappa"))
for mode, clf in cells:
    report = run_experiment(train, test, FeatureConfig(mode=mode, k=128, embed_dim=64),
                            ClassifierConfig(name=clf, lr_l2=0.1, lstm_hidden=32, lstm_epochs=5)).report
    p = report.percentages()
    print("%-16s %-5s %8.2f %8.2f %8.2f %8.2f" % (mode, clf, p["accuracy"], p["f1"], p["mcc"], p["kappa"]))
