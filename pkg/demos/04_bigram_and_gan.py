"""
Bigram sampling and a small adversarial generator
=================================================

A bigram model memorizes word pairs. The GAN instead learns an LSTM emission
layer against a discriminator that sees final hidden states; on an 8-token
Markov chain the generated bigram distribution moves toward the real one.
Takes about 25 seconds.
"""

from complaintlab.fixtures import toy_gan_setup
from complaintlab.generate import bigram_generate, fit_bigram, generator_rollout, train_gan

sentence = "unexpected fees and inaccurate credit statements".split()
model = fit_bigram([sentence])
for pair, count, prob in model.table():
    print(pair, count, prob)
print(" ".join(bigram_generate(model, "unexpected", 6)))

docs, provider, config = toy_gan_setup()
print("real:", " ".join(docs[0]))
gen, disc, history = train_gan(docs, provider, config)
for row in history.rows[::50] + history.rows[-1:]:
    print("epoch %3d  V=%.3f  d_acc=%.3f  js=%.4f" % (row["epoch"], row["V"], row["d_accuracy"],
                                                     row["js_divergence"]))

rollouts = generator_rollout(gen, config.max_len, seed=1, batch=5)
for toks in rollouts.token_lists(gen.vocab):
    print("fake:", " ".join(toks))
