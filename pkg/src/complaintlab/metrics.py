"""Confusion counts and the four evaluation metrics: accuracy, F1, MCC and
Cohen's kappa.

Zero-denominator conventions: MCC is 0 when any marginal is empty, per-class
F1 is 0 when ``2tp + fp + fn == 0``, and kappa is 1 (perfect agreement) or 0
when the chance agreement ``p_e`` equals 1.
"""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import LengthMismatch, NonBinaryLabels, SchemaMismatch

METRIC_NAMES = ("accuracy", "f1", "mcc", "kappa")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    def swapped(self):
        """Counts with the roles of the two classes exchanged."""
        return ConfusionCounts(tp=self.tn, fp=self.fn, tn=self.tp, fn=self.fp)


def _check(y_true, y_pred):
    y_true = np.asarray(y_true).ravel()
    y_pred = np.asarray(y_pred).ravel()
    if y_true.size == 0 or y_true.size != y_pred.size:
        raise LengthMismatch(f"label vectors of length {y_true.size} and {y_pred.size}")
    labels = set(np.unique(y_true).tolist()) | set(np.unique(y_pred).tolist())
    if len(labels) > 2:
        raise NonBinaryLabels(f"more than two labels: {sorted(labels, key=str)}")
    return y_true, y_pred


def confusion(y_true, y_pred, positive_class=1):
    y_true, y_pred = _check(y_true, y_pred)
    t = y_true == positive_class
    p = y_pred == positive_class
    return ConfusionCounts(
        tp=int(np.sum(t & p)), fp=int(np.sum(~t & p)),
        tn=int(np.sum(~t & ~p)), fn=int(np.sum(t & ~p)),
    )


def accuracy(c):
    return (c.tp + c.tn) / c.total


def _f1_binary(tp, fp, fn):
    denom = 2 * tp + fp + fn
    return 0.0 if denom == 0 else 2 * tp / denom


def f1_from_counts(c, mode="weighted"):
    pos = _f1_binary(c.tp, c.fp, c.fn)
    if mode == "binary":
        return pos
    neg = _f1_binary(c.tn, c.fn, c.fp)
    if mode == "macro":
        return (pos + neg) / 2
    if mode == "weighted":
        return (pos * (c.tp + c.fn) + neg * (c.tn + c.fp)) / c.total
    raise ValueError(f"unknown F1 mode {mode!r}")


def f1(y_true, y_pred, mode="weighted", positive_class=1):
    return f1_from_counts(confusion(y_true, y_pred, positive_class), mode)


def mcc(c):
    # Python ints keep the products exact for large counts.
    num = c.tp * c.tn - c.fp * c.fn
    a, b = c.tp + c.fp, c.tp + c.fn
    d, e = c.tn + c.fp, c.tn + c.fn
    if a == 0 or b == 0 or d == 0 or e == 0:
        return 0.0
    return max(-1.0, min(1.0, num / math.sqrt(a * b * d * e)))


def kappa_from_agreement(p_o, p_e):
    if p_e == 1:
        return 1.0 if p_o == 1 else 0.0
    return (p_o - p_e) / (1 - p_e)


def kappa_from_counts(c):
    n = c.total
    p_o = (c.tp + c.tn) / n
    p_e = ((c.tp + c.fn) * (c.tp + c.fp) + (c.tn + c.fp) * (c.tn + c.fn)) / (n * n)
    return kappa_from_agreement(p_o, p_e)


def cohens_kappa(y_true, y_pred):
    y_true, y_pred = _check(y_true, y_pred)
    labels = np.unique(np.concatenate([y_true, y_pred]))
    return kappa_from_counts(confusion(y_true, y_pred, labels[-1]))


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    f1: float
    mcc: float
    kappa: float
    counts: ConfusionCounts
    positive_class: object = 1
    f1_mode: str = "weighted"

    def percentages(self):
        return {name: round(100 * getattr(self, name), 2) for name in METRIC_NAMES}

    def to_json(self):
        body = {
            "metrics": self.percentages(),
            "counts": asdict(self.counts),
            "positive_class": self.positive_class,
            "f1_mode": self.f1_mode,
        }
        return json.dumps(body, indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_json(cls, text):
        body = json.loads(text)
        m = body["metrics"]
        if set(m) != set(METRIC_NAMES):
            raise SchemaMismatch(f"metric set {sorted(m)} differs from {sorted(METRIC_NAMES)}")
        return cls(
            accuracy=m["accuracy"] / 100, f1=m["f1"] / 100, mcc=m["mcc"] / 100, kappa=m["kappa"] / 100,
            counts=ConfusionCounts(**body["counts"]),
            positive_class=body.get("positive_class", 1), f1_mode=body.get("f1_mode", "weighted"),
        )


def evaluate_all(y_true, y_pred, positive_class=1, f1_mode="weighted"):
    c = confusion(y_true, y_pred, positive_class)
    return MetricReport(
        accuracy=accuracy(c), f1=f1_from_counts(c, f1_mode), mcc=mcc(c), kappa=kappa_from_counts(c),
        counts=c, positive_class=positive_class, f1_mode=f1_mode,
    )


def compare_reports(real, synthetic):
    """Rows ``(metric, real %, synthetic %, delta pp)`` in fixed metric order."""
    a = real.percentages() if isinstance(real, MetricReport) else dict(real)
    b = synthetic.percentages() if isinstance(synthetic, MetricReport) else dict(synthetic)
    if set(a) != set(b) or set(a) != set(METRIC_NAMES):
        raise SchemaMismatch(f"cannot compare metric sets {sorted(a)} and {sorted(b)}")
    return [(name, a[name], b[name], round(b[name] - a[name], 2)) for name in METRIC_NAMES]


def format_comparison(rows):
    lines = [f"{'metric':<10}{'real':>10}{'synthetic':>12}{'delta':>10}"]
    for name, r, s, d in rows:
        lines.append(f"{name:<10}{r:>10.2f}{s:>12.2f}{d:>+10.2f}")
    return "\n".join(lines) + "\n"
