"""Synthetic narrative generation: bigram sampling and per-label LSTM GANs."""

from .bigram import BigramModel, bigram_generate, fit_bigram
from .gan import (
    EOS, DiscriminatorParams, GanConfig, GanHistory, GeneratorParams, SyntheticRecord,
    discriminator_score, encode_real, gan_value, gan_value_grad, generate_synthetic_corpus,
    generator_rollout, js_divergence, train_gan, write_synthetic_corpus,
)

__all__ = [
    "EOS", "BigramModel", "DiscriminatorParams", "GanConfig", "GanHistory", "GeneratorParams",
    "SyntheticRecord", "bigram_generate", "discriminator_score", "encode_real", "fit_bigram",
    "gan_value", "gan_value_grad", "generate_synthetic_corpus", "generator_rollout",
    "js_divergence", "train_gan", "write_synthetic_corpus",
]
