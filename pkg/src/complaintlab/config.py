"""Flat ``section.key = value`` configuration with typed defaults.

A config file holds one assignment per line; blank lines and lines starting
with ``#`` are ignored. Every key must be known, and values are coerced to
the type of the default. ``none`` clears an optional value.
"""

import hashlib
from dataclasses import dataclass
from datetime import date

from .classify import CLASSIFIERS, FEATURE_MODES, SplitConfig, check_compatibility
from .errors import ConfigError
from .generate.gan import GanConfig
from .ingest import FilterConfig, parse_date


@dataclass(frozen=True)
class FeatureConfig:
    mode: str = "tfidf"
    k: int = 768  # truncated rank
    tf_cap: float | None = None
    embed_dim: int = 768
    metadata: bool = True  # prepend category dummies and log dollar value
    seed: int = 0


@dataclass(frozen=True)
class ClassifierConfig:
    name: str = "lr"
    lr_learning_rate: float = 1.0
    lr_epochs: int = 300
    lr_l2: float = 1e-3
    rf_n_trees: int = 100
    rf_max_depth: int = 12
    rf_min_leaf: int = 2
    lstm_hidden: int = 64
    lstm_epochs: int = 10
    lstm_batch_size: int = 32
    lstm_learning_rate: float = 1e-2
    seed: int = 0


_GAN = GanConfig()

# key -> (default, type); a type of ``None`` marks an optional float
DEFAULTS = {
    "seed": (0, int),
    "paths.input": ("complaints.csv", str),
    "paths.workdir": ("work", str),
    "filter.date_min": (date(2020, 1, 1), date),
    "filter.date_max": (date(2024, 12, 31), date),
    "filter.min_category_frequency": (1000, int),
    "filter.dollar_min": (0.0, float),
    "filter.dollar_max": (10000.0, float),
    "filter.min_narrative_words": (3, int),
    "summarize.max_words": (128, int),
    "split.r": (0.2, float),
    "features.mode": ("tfidf", str),
    "features.k": (768, int),
    "features.tf_cap": (None, None),
    "features.embed_dim": (768, int),
    "features.metadata": (True, bool),
    "classifier.name": ("lr", str),
    "lr.learning_rate": (1.0, float),
    "lr.epochs": (300, int),
    "lr.l2": (1e-3, float),
    "rf.n_trees": (100, int),
    "rf.max_depth": (12, int),
    "rf.min_leaf": (2, int),
    "lstm.hidden": (64, int),
    "lstm.epochs": (10, int),
    "lstm.batch_size": (32, int),
    "lstm.learning_rate": (1e-2, float),
}
for _name in GanConfig.__dataclass_fields__:
    if _name != "seed":
        _val = getattr(_GAN, _name)
        DEFAULTS[f"gan.{_name}"] = (_val, type(_val))


def _coerce(key, text, kind):
    text = text.strip()
    try:
        if kind is None:
            return None if text.lower() in ("", "none") else float(text)
        if kind is bool:
            low = text.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(text)
        if kind is date:
            return parse_date(text)
        return kind(text)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad value for {key}: {text!r}") from exc


def _format(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, date):
        return value.isoformat()
    return repr(value) if isinstance(value, float) else str(value)


def stage_seed(seed, stage):
    """Seed for one pipeline stage, derived from the global seed by stable hashing."""
    digest = hashlib.blake2b(f"{seed}:{stage}".encode(), digest_size=4).digest()
    return int.from_bytes(digest, "little")


class Settings:
    """Typed view over the flat key space."""

    def __init__(self, values=None):
        self.values = {k: v for k, (v, _) in DEFAULTS.items()}
        for k, v in (values or {}).items():
            self.set(k, v)

    def set(self, key, value):
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key {key!r}")
        kind = DEFAULTS[key][1]
        if isinstance(value, str) and kind is not str:
            value = _coerce(key, value, kind)
        self.values[key] = value

    def __getitem__(self, key):
        return self.values[key]

    @classmethod
    def from_text(cls, text):
        s = cls()
        for n, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"config line {n}: expected 'key = value'")
            key, value = line.split("=", 1)
            s.set(key.strip(), value.strip())
        return s

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc

    def to_text(self):
        return "".join(f"{k} = {_format(self.values[k])}\n" for k in DEFAULTS)

    def validate(self):
        if self["features.mode"] not in FEATURE_MODES:
            raise ConfigError(f"features.mode must be one of {FEATURE_MODES}")
        if self["classifier.name"] not in CLASSIFIERS:
            raise ConfigError(f"classifier.name must be one of {CLASSIFIERS}")
        check_compatibility(self["features.mode"], self["classifier.name"])
        try:
            self.filter_config()
            self.split_config()
            self.gan_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        for key in ("features.k", "features.embed_dim", "summarize.max_words"):
            if self[key] < 1:
                raise ConfigError(f"{key} must be positive")
        return self

    def seed_for(self, stage):
        return stage_seed(self["seed"], stage)

    def filter_config(self):
        return FilterConfig(
            date_min=self["filter.date_min"], date_max=self["filter.date_max"],
            min_category_frequency=self["filter.min_category_frequency"],
            dollar_min=self["filter.dollar_min"], dollar_max=self["filter.dollar_max"],
            min_narrative_words=self["filter.min_narrative_words"])

    def split_config(self):
        return SplitConfig(r=self["split.r"], seed=self.seed_for("split"))

    def feature_config(self):
        return FeatureConfig(mode=self["features.mode"], k=self["features.k"], tf_cap=self["features.tf_cap"],
                             embed_dim=self["features.embed_dim"], metadata=self["features.metadata"],
                             seed=self.seed_for("features"))

    def classifier_config(self):
        return ClassifierConfig(
            name=self["classifier.name"],
            lr_learning_rate=self["lr.learning_rate"], lr_epochs=self["lr.epochs"], lr_l2=self["lr.l2"],
            rf_n_trees=self["rf.n_trees"], rf_max_depth=self["rf.max_depth"], rf_min_leaf=self["rf.min_leaf"],
            lstm_hidden=self["lstm.hidden"], lstm_epochs=self["lstm.epochs"],
            lstm_batch_size=self["lstm.batch_size"], lstm_learning_rate=self["lstm.learning_rate"],
            seed=self.seed_for("classifier"))

    def gan_config(self):
        kw = {name: self[f"gan.{name}"] for name in GanConfig.__dataclass_fields__ if name != "seed"}
        return GanConfig(seed=self.seed_for("gan"), **kw)
