import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateSplit


@dataclass(frozen=True)
class SplitConfig:
    r: float = 0.2  # test fraction
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.r < 1:
            raise ValueError(f"test fraction r must lie in (0, 1), got {self.r}")


def split_indices(n, config):
    """Seeded random partition of ``range(n)``; the test side has ``round(r * n)`` items.

    Rounding is half-up. Both index arrays are returned sorted.
    """
    if n < 2:
        raise DegenerateSplit(f"cannot split {n} item(s)")
    n_test = math.floor(config.r * n + 0.5)
    if n_test == 0 or n_test == n:
        raise DegenerateSplit(f"r={config.r} on n={n} leaves an empty side")
    perm = np.random.default_rng(config.seed).permutation(n)
    return np.sort(perm[n_test:]), np.sort(perm[:n_test])


def train_test_split(dataset, config):
    """Split a sequence or array along its first axis into ``(train, test)``."""
    train_idx, test_idx = split_indices(len(dataset), config)
    if isinstance(dataset, np.ndarray) or hasattr(dataset, "tocsr"):
        return dataset[train_idx], dataset[test_idx]
    return [dataset[i] for i in train_idx], [dataset[i] for i in test_idx]
