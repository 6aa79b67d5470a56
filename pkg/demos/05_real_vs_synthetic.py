"""
Training on synthetic narratives, testing on real ones
======================================================

One generator per outcome is trained on that outcome's training narratives;
an LSTM classifier trained only on their samples is then scored on the real
test split and compared with one trained on the real training split. Takes
about a minute.
"""

from complaintlab.classify import SplitConfig, predict
from complaintlab.classify.lstm import train_lstm_classifier
from complaintlab.featurize import HashEmbeddingProvider
from complaintlab.fixtures import desk_corpus_csv
from complaintlab.generate import GanConfig, generate_synthetic_corpus, train_gan
from complaintlab.ingest import FilterConfig, filter_records, parse_complaints_csv
from complaintlab.metrics import compare_reports, evaluate_all, format_comparison
from complaintlab.pipeline import corpus_from_records, split_corpus

raw = parse_complaints_csv(desk_corpus_csv(2000, seed=7, lean=1.0))
corpus = corpus_from_records(filter_records(raw, FilterConfig(min_category_frequency=1)))
train, test = split_corpus(corpus, SplitConfig(0.2, seed=0))
provider = HashEmbeddingProvider(dim=32, seed=0)

real_model = train_lstm_classifier(train.docs, train.labels, provider, hidden=32, epochs=5)
real = evaluate_all(test.labels, predict(real_model, test.docs)[0])

# rare words (mostly dollar-amount fragments) are left out of the generators' vocabularies
config = GanConfig(max_len=30, hidden=32, epochs=100, batch_size=256, g_lr=0.003, cell_lr_scale=0.0,
                   min_count=30, samples_per_label=800)
generators = {}
for label in (False, True):
    docs = [d for d, y in zip(train.docs, train.labels) if bool(y) == label]
    generators[label] = train_gan(docs, provider, config)[0]
synthetic = generate_synthetic_corpus(generators, config)
print("synthetic example:", " ".join(synthetic[-1].tokens))

syn_model = train_lstm_classifier([s.tokens for s in synthetic], [int(s.label) for s in synthetic], provider,
                                  hidden=32, epochs=5)
syn = evaluate_all(test.labels, predict(syn_model, test.docs)[0])
print(format_comparison(compare_reports(real, syn)))
