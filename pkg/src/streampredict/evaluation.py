"""Fractional confusion counts and derived scores.

For each pair, with predicted count ``p`` and actual count ``a``:
``TP = min(p, a)``, ``FP = max(p - a, 0)``, ``FN = max(a - p, 0)``. Sums run
over the union of predicted and actual pairs in canonical pair order.
"""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .predictor import PairMap
from .stream import LinkStream, NodePair, node_key

__all__ = [
    "Confusion",
    "EvaluationReport",
    "confusion",
    "prf",
    "evaluate",
    "categorize_pairs",
    "category_labels",
    "macro_f",
    "summarize_realizations",
]


@dataclass(frozen=True)
class Confusion:
    tp: float = 0.0
    fp: float = 0.0
    fn_: float = 0.0

    def __add__(self, other):
        return Confusion(self.tp + other.tp, self.fp + other.fp, self.fn_ + other.fn_)

    @property
    def predicted(self) -> float:
        return self.tp + self.fp

    @property
    def actual(self) -> float:
        return self.tp + self.fn_


def prf(c: Confusion) -> tuple[float, float, float]:
    """Precision, recall and F-score; each is 0 when its denominator is 0."""
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp > 0 else 0.0
    recall = c.tp / (c.tp + c.fn_) if c.tp + c.fn_ > 0 else 0.0
    f = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f


@dataclass(frozen=True)
class EvaluationReport:
    confusion: Confusion
    precision: float
    recall: float
    f_score: float
    predicted_total: float
    actual_total: float
    breakdowns: dict = field(default_factory=dict)

    @classmethod
    def from_confusion(cls, c: Confusion, breakdowns=None):
        p, r, f = prf(c)
        return cls(c, p, r, f, c.predicted, c.actual, dict(breakdowns or {}))

    def to_dict(self) -> dict:
        out = {
            "tp": self.confusion.tp,
            "fp": self.confusion.fp,
            "fn": self.confusion.fn_,
            "precision": self.precision,
            "recall": self.recall,
            "f_score": self.f_score,
            "predicted_total": self.predicted_total,
            "actual_total": self.actual_total,
        }
        if self.breakdowns:
            out["breakdowns"] = {k: v.to_dict() for k, v in self.breakdowns.items()}
        return out


def _aligned(predicted, actual):
    """Union pair codes (or pairs) with predicted and actual values aligned to them."""
    if isinstance(predicted, PairMap) and isinstance(actual, PairMap) \
            and predicted.nodes == actual.nodes:
        codes = np.union1d(predicted.codes, actual.codes)
        pred = np.zeros(len(codes))
        act = np.zeros(len(codes))
        pred[np.searchsorted(codes, predicted.codes)] = predicted.values
        act[np.searchsorted(codes, actual.codes)] = actual.values
        return codes, pred, act
    p = _as_dict(predicted)
    a = _as_dict(actual)
    keys = sorted(set(p) | set(a), key=lambda q: (node_key(q[0]), node_key(q[1])))
    pred = np.array([p.get(k, 0.0) for k in keys], dtype=np.float64)
    act = np.array([a.get(k, 0.0) for k in keys], dtype=np.float64)
    return keys, pred, act


def _as_dict(x) -> dict:
    if isinstance(x, PairMap):
        return x.to_dict()
    if isinstance(x, Mapping):
        return {NodePair.of(*k): float(v) for k, v in x.items()}
    raise TypeError(f"expected a PairMap or a mapping, got {type(x).__name__}")


def _check(pred, act):
    if np.any(pred < 0) or not np.all(np.isfinite(pred)):
        raise ValueError("predicted counts must be finite and >= 0")
    if np.any(act < 0) or not np.all(np.isfinite(act)):
        raise ValueError("actual counts must be finite and >= 0")


def confusion(predicted, actual) -> Confusion:
    """Fractional TP/FP/FN of predicted versus actual per-pair counts."""
    _, pred, act = _aligned(predicted, actual)
    _check(pred, act)
    return Confusion(*_kernels.confusion_sums(pred, act))


def evaluate(predicted, actual, labelers=None) -> EvaluationReport:
    """Overall report plus one breakdown per label.

    ``labelers`` is a list of functions mapping the array of union pair codes
    to an array of string labels; every label becomes a breakdown entry. Both
    inputs must then be :class:`PairMap` over the same node index.
    """
    keys, pred, act = _aligned(predicted, actual)
    _check(pred, act)
    overall = Confusion(*_kernels.confusion_sums(pred, act))
    breakdowns = {}
    for labeler in labelers or ():
        if not isinstance(keys, np.ndarray):
            raise TypeError("breakdowns need PairMap inputs over a shared node index")
        labels = np.asarray(labeler(keys))
        for label in sorted(set(labels.tolist())):
            mask = labels == label
            c = Confusion(*_kernels.confusion_sums(pred[mask], act[mask]))
            breakdowns[label] = EvaluationReport.from_confusion(c)
    return EvaluationReport.from_confusion(overall, breakdowns)


def category_labels(observation: LinkStream):
    """Labeler marking pairs active in ``observation`` as recurrent, others as new."""
    active = observation.pair_counts()[0]

    def label(codes):
        return np.where(np.isin(codes, active), "recurrent", "new")

    return label


def categorize_pairs(observation: LinkStream, pairs) -> dict[str, set]:
    """Split ``pairs`` into ``recurrent`` (>= 1 link in the observation) and ``new``."""
    out = {"new": set(), "recurrent": set()}
    for pair in pairs:
        pair = NodePair.of(*pair)
        key = "recurrent" if observation.pair_activity(pair) > 0 else "new"
        out[key].add(pair)
    return out


def macro_f(reports) -> float:
    """Harmonic mean of per-class F-scores; 0 as soon as one class scores 0."""
    scores = [r.f_score if isinstance(r, EvaluationReport) else float(r) for r in reports]
    if not scores:
        raise ValueError("macro_f needs at least one class")
    if any(f <= 0 for f in scores):
        return 0.0
    return len(scores) / sum(1.0 / f for f in scores)


def summarize_realizations(reports) -> dict:
    """Mean and standard deviation of P/R/F over runs, plus P/R/F of the mean confusion."""
    reports = list(reports)
    if not reports:
        raise ValueError("no realizations to summarize")
    out = {"realizations": len(reports)}
    for key in ("precision", "recall", "f_score", "predicted_total", "actual_total"):
        vals = np.array([getattr(r, key) for r in reports], dtype=np.float64)
        out[f"mean_{key}"] = float(vals.mean())
        out[f"std_{key}"] = float(vals.std())
    k = len(reports)
    mean_c = Confusion(sum(r.confusion.tp for r in reports) / k,
                       sum(r.confusion.fp for r in reports) / k,
                       sum(r.confusion.fn_ for r in reports) / k)
    p, r, f = prf(mean_c)
    out["f_of_mean_confusion"] = {"precision": p, "recall": r, "f_score": f}
    return out
