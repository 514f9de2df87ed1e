"""Prediction index, global link budget and proportional allocation."""
from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateIndexError, PipelineError
from .metrics import MetricId, ScoreTable, parse_metric
from .stream import Interval, LinkStream, NodeIndex, NodePair

__all__ = [
    "PairMap",
    "ActivityPrediction",
    "check_weights",
    "combine",
    "prediction_index",
    "extrapolate_total",
    "allocate",
]


@dataclass(frozen=True, eq=False)
class PairMap:
    """Real values over a sorted array of pair codes."""

    nodes: NodeIndex
    codes: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.codes)

    def pairs(self) -> list[NodePair]:
        return self.nodes.decode_many(self.codes)

    def to_dict(self) -> dict:
        return dict(zip(self.pairs(), self.values.tolist()))

    def get(self, pair, default=0.0) -> float:
        try:
            code = self.nodes.encode_pair(pair)
        except (KeyError, ValueError):
            return default
        k = np.searchsorted(self.codes, code)
        if k < len(self.codes) and self.codes[k] == code:
            return float(self.values[k])
        return default

    def total(self) -> float:
        return float(self.values.sum())

    @classmethod
    def from_mapping(cls, mapping: Mapping, nodes: NodeIndex | None = None):
        """Build from ``{(u, v): value}``; the node index is inferred when not given."""
        items = [(NodePair.of(*p), float(x)) for p, x in mapping.items()]
        if nodes is None:
            nodes = NodeIndex([n for p, _ in items for n in p])
        if not items:
            return cls(nodes, np.zeros(0, dtype=np.int64), np.zeros(0))
        codes = np.array([nodes.encode_pair(p) for p, _ in items], dtype=np.int64)
        values = np.array([x for _, x in items], dtype=np.float64)
        order = np.argsort(codes, kind="stable")
        codes, values = codes[order], values[order]
        if len(codes) > 1 and np.any(codes[1:] == codes[:-1]):
            raise ValueError("mapping lists the same pair twice")
        return cls(nodes, codes, values)

    @classmethod
    def from_stream(cls, stream: LinkStream):
        """Observed link counts of every active pair."""
        codes, counts = stream.pair_counts()
        return cls(stream.nodes, codes, counts.astype(np.float64))


@dataclass(frozen=True, eq=False)
class ActivityPrediction(PairMap):
    """Predicted link counts per pair; ``budget`` is the global number N."""

    budget: float = 0.0

    @property
    def counts(self) -> np.ndarray:
        return self.values


def check_weights(weights: Mapping) -> dict[MetricId, float]:
    out = {}
    for key, alpha in weights.items():
        metric = parse_metric(key)
        alpha = float(alpha)
        if not math.isfinite(alpha) or alpha < 0:
            raise ConfigError(f"weight of {metric} must be finite and >= 0, got {alpha}",
                              module="predictor")
        if metric in out:
            raise ConfigError(f"metric {metric} weighted twice", module="predictor")
        out[metric] = alpha
    return out


def combine(alphas, columns) -> np.ndarray:
    """``sum_m alphas[m] * columns[m]``, accumulated in list order."""
    out = None
    for alpha, col in zip(alphas, columns):
        term = alpha * col
        out = term if out is None else out + term
    return out


def prediction_index(weights: Mapping, tables: list[ScoreTable]) -> PairMap:
    """Linear combination of normalised tables over the union of their pairs.

    Tables are combined in list order; a metric without weight contributes
    nothing, a weight without table is a configuration error.
    """
    weights = check_weights(weights)
    by_metric = {}
    for t in tables:
        if t.metric in by_metric:
            raise ConfigError(f"two tables for metric {t.metric}", module="predictor")
        by_metric[t.metric] = t
    missing = [str(m) for m in weights if m not in by_metric]
    if missing:
        raise ConfigError(f"no score table for weighted metric(s) {', '.join(missing)}",
                          module="predictor")
    if not tables:
        return PairMap(NodeIndex([]), np.zeros(0, dtype=np.int64), np.zeros(0))
    nodes = tables[0].nodes
    if any(t.nodes != nodes for t in tables):
        raise ConfigError("tables use different node sets", module="predictor")
    codes = tables[0].codes
    if not all(np.array_equal(t.codes, codes) for t in tables[1:]):
        codes = np.unique(np.concatenate([t.codes for t in tables]))
    used = [t for t in tables if t.metric in weights]
    columns = []
    for t in used:
        if len(t.codes) == len(codes) and np.array_equal(t.codes, codes):
            columns.append(t.scores)
        else:
            col = np.zeros(len(codes))
            col[np.searchsorted(codes, t.codes)] = t.scores
            columns.append(col)
    values = combine([weights[t.metric] for t in used], columns)
    if values is None:
        values = np.zeros(len(codes))
    return PairMap(nodes, codes, values)


def extrapolate_total(stream: LinkStream, prediction_window: Interval) -> float:
    """Global link budget: the input link rate times the prediction window length."""
    if not isinstance(prediction_window, Interval):
        prediction_window = Interval(*prediction_window)
    span = stream.interval.length
    if span <= 0:
        raise PipelineError("input interval has zero length; cannot extrapolate activity",
                            module="predictor")
    return len(stream) * (prediction_window.length / span)


def allocate(budget: float, index) -> ActivityPrediction:
    """Split ``budget`` links across pairs proportionally to the prediction index."""
    if not isinstance(index, PairMap):
        index = PairMap.from_mapping(index)
    budget = float(budget)
    if not math.isfinite(budget) or budget < 0:
        raise ValueError(f"budget must be finite and >= 0, got {budget}")
    values = index.values
    if np.any(values < 0) or not np.all(np.isfinite(values)):
        raise ValueError("prediction index values must be finite and >= 0")
    if budget == 0:
        counts = np.zeros(len(values))
    else:
        total = float(values.sum())
        if total <= 0:
            raise DegenerateIndexError(
                f"prediction index sums to zero; cannot allocate {budget:g} links")
        counts = budget * (values / total)
    return ActivityPrediction(index.nodes, index.codes, counts, budget)
