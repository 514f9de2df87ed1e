"""Pair scoring metrics and their normalisation.

Three families score a node pair from a link stream:

* structural (CN, JI, SI, AA, RA): neighbourhood overlap, time-blind;
* hybrid (WCN, WSI, WAA, WRA): the same overlaps weighted by pair activities;
* temporal (PAE, PAE<d>S, PAE<k>L): the pair's own recent link history.

Logarithms are natural. Degenerate terms are zeroed rather than allowed to
diverge: a shared neighbour ``w`` with ``|N(w)| <= 1`` adds nothing to AA, one
whose summed log-activity is 0 adds nothing to WAA, and ratio metrics with a
zero denominator score 0.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConfigError
from .stream import LinkStream, NodeIndex, NodePair

__all__ = [
    "MetricId",
    "ScoreTable",
    "ALL_METRICS",
    "REDUCED_METRICS",
    "STRUCTURAL",
    "HYBRID",
    "TEMPORAL",
    "parse_metric",
    "parse_metrics",
    "structural_score",
    "hybrid_score",
    "temporal_score",
    "score_metric",
    "raw_table",
    "normalize",
    "score_all",
    "correlation_matrix",
]

STRUCTURAL = ("CN", "JI", "SI", "AA", "RA")
HYBRID = ("WCN", "WSI", "WAA", "WRA")
TEMPORAL = ("PAE", "PAE_DELTA_S", "PAE_K_L")
KINDS = STRUCTURAL + HYBRID + TEMPORAL


def _fmt_param(x):
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


@dataclass(frozen=True, order=True)
class MetricId:
    """Metric kind plus its parameter (``delta`` seconds or ``k`` links for the PAE variants)."""

    kind: str
    param: float | int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.kind == "PAE_DELTA_S":
            if self.param is None or not float(self.param) > 0:
                raise ValueError(f"PAE_DELTA_S needs delta > 0, got {self.param!r}")
            object.__setattr__(self, "param", float(self.param))
        elif self.kind == "PAE_K_L":
            if self.param is None or int(self.param) != self.param or int(self.param) < 1:
                raise ValueError(f"PAE_K_L needs an integer k >= 1, got {self.param!r}")
            object.__setattr__(self, "param", int(self.param))
        elif self.param is not None:
            raise ValueError(f"metric {self.kind} takes no parameter")

    @property
    def name(self) -> str:
        if self.kind == "PAE_DELTA_S":
            return f"PAE{_fmt_param(self.param)}S"
        if self.kind == "PAE_K_L":
            return f"PAE{self.param}L"
        return self.kind

    @property
    def family(self) -> str:
        if self.kind in STRUCTURAL:
            return "structural"
        if self.kind in HYBRID:
            return "hybrid"
        return "temporal"

    def __str__(self):
        return self.name


_DELTA_RE = re.compile(r"^PAE(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)S$")
_K_RE = re.compile(r"^PAE(\d+)L$")


def parse_metric(text) -> MetricId:
    """Parse a metric name such as ``CN``, ``PAE1000S`` or ``PAE10L``."""
    if isinstance(text, MetricId):
        return text
    name = str(text).strip().upper()
    if name in STRUCTURAL + HYBRID + ("PAE",):
        return MetricId(name)
    m = _DELTA_RE.match(name)
    if m:
        return MetricId("PAE_DELTA_S", float(m.group(1)))
    m = _K_RE.match(name)
    if m:
        return MetricId("PAE_K_L", int(m.group(1)))
    raise ConfigError(f"unknown metric {text!r}", module="metrics")


def parse_metrics(items) -> list[MetricId]:
    if isinstance(items, str):
        items = [x for x in re.split(r"[,\s]+", items) if x]
    return [parse_metric(x) for x in items]


ALL_METRICS = tuple(parse_metrics(
    "CN JI SI AA RA WCN WSI WAA WRA PAE PAE10L PAE100S PAE1000S PAE10000S"))
REDUCED_METRICS = tuple(parse_metrics("CN SI WCN PAE PAE10L PAE1000S PAE10000S"))


@dataclass(frozen=True, eq=False)
class ScoreTable:
    """Scores of one metric over a set of pairs.

    ``codes`` are sorted pair codes under ``nodes``; ``raw`` the raw scores and
    ``scores`` the current values (equal to ``raw`` until normalised).
    ``normalization_max`` is ``None`` for a raw table.
    """

    metric: MetricId
    nodes: NodeIndex
    codes: np.ndarray
    raw: np.ndarray
    scores: np.ndarray = field(default=None)
    normalization_max: float | None = None

    def __post_init__(self):
        if self.scores is None:
            object.__setattr__(self, "scores", self.raw)
        for arr in (self.codes, self.raw, self.scores):
            arr.setflags(write=False)

    def __len__(self):
        return len(self.codes)

    @property
    def normalized(self) -> bool:
        return self.normalization_max is not None

    def pairs(self) -> list[NodePair]:
        return self.nodes.decode_many(self.codes)

    def to_dict(self) -> dict:
        return dict(zip(self.pairs(), self.scores.tolist()))

    def raw_dict(self) -> dict:
        return dict(zip(self.pairs(), self.raw.tolist()))

    def get(self, pair, default=0.0) -> float:
        try:
            code = self.nodes.encode_pair(pair)
        except (KeyError, ValueError):
            return default
        k = np.searchsorted(self.codes, code)
        if k < len(self.codes) and self.codes[k] == code:
            return float(self.scores[k])
        return default


# -- single-pair scoring -------------------------------------------------------

def _single(stream, metric, pair):
    u, v = pair
    if u == v or u not in stream.nodes or v not in stream.nodes:
        return 0.0
    code = np.array([stream.nodes.encode(u, v)], dtype=np.int64)
    return float(score_metric(stream, metric, code)[0])


def structural_score(kind, stream: LinkStream, pair) -> float:
    if kind not in STRUCTURAL:
        raise ValueError(f"{kind!r} is not a structural metric")
    return _single(stream, MetricId(kind), pair)


def hybrid_score(kind, stream: LinkStream, pair) -> float:
    if kind not in HYBRID:
        raise ValueError(f"{kind!r} is not a hybrid metric")
    return _single(stream, MetricId(kind), pair)


def temporal_score(metric, stream: LinkStream, pair) -> float:
    metric = parse_metric(metric)
    if metric.kind not in TEMPORAL:
        raise ValueError(f"{metric} is not a temporal metric")
    return _single(stream, metric, pair)


# -- tables ------------------------------------------------------------------

def score_metric(stream: LinkStream, metric: MetricId, codes) -> np.ndarray:
    """Raw scores of ``metric`` on ``stream`` for the pair codes ``codes``.

    This is the single scoring pass per metric; everything downstream reuses
    its output.
    """
    codes = np.asarray(codes, dtype=np.int64)
    if metric.kind in TEMPORAL:
        kind = _kernels.TEMPORAL_KINDS.index(metric.kind)
        sorted_codes, sorted_times = stream.pair_times()
        return _kernels.temporal_scores(kind, metric.param or 0, sorted_codes, sorted_times,
                                        codes, stream.end, stream.min_time_gap)
    kind = _kernels.NEIGHBOR_KINDS.index(metric.kind)
    us, vs = np.divmod(codes, len(stream.nodes))
    return _kernels.neighbor_scores(kind, stream.adjacency, us, vs)


def _as_codes(stream, pairs):
    if pairs is None:
        return stream.candidate_codes()
    if isinstance(pairs, np.ndarray):
        return np.unique(pairs.astype(np.int64))
    try:
        codes = [stream.nodes.encode_pair(p) for p in pairs]
    except KeyError as exc:
        raise ValueError(f"pair references node {exc.args[0]!r} outside the node set") from None
    return np.unique(np.array(codes, dtype=np.int64))


def raw_table(stream: LinkStream, metric, pairs=None) -> ScoreTable:
    metric = parse_metric(metric)
    codes = _as_codes(stream, pairs)
    return ScoreTable(metric, stream.nodes, codes, score_metric(stream, metric, codes))


def normalize(table: ScoreTable) -> ScoreTable:
    """Divide raw scores by their maximum; an all-zero table stays zero with max 0."""
    raw = table.raw
    top = float(raw.max()) if len(raw) else 0.0
    if top > 0:
        scores = raw / top
    else:
        scores = np.zeros_like(raw)
    return ScoreTable(table.metric, table.nodes, table.codes, raw, scores, top)


def score_all(stream: LinkStream, metrics, pairs=None) -> list[ScoreTable]:
    """One normalised table per metric, in the given order, over a shared pair set.

    ``pairs`` defaults to the stream's candidate pairs; it may be a set of
    node pairs or an array of pair codes.
    """
    metrics = [parse_metric(m) for m in metrics]
    if len(set(metrics)) != len(metrics):
        raise ConfigError("duplicate metric in metric list", module="metrics")
    if not metrics:
        return []
    codes = _as_codes(stream, pairs)
    return [normalize(ScoreTable(m, stream.nodes, codes, score_metric(stream, m, codes)))
            for m in metrics]


def correlation_matrix(tables) -> np.ndarray:
    """Pearson correlations between score vectors; NaN marks a constant vector."""
    tables = list(tables)
    if len(tables) < 2:
        raise ValueError("need at least two tables")
    ref = tables[0]
    for t in tables[1:]:
        if t.nodes != ref.nodes or not np.array_equal(t.codes, ref.codes):
            raise ValueError("tables are defined over different pair sets")
    data = np.vstack([t.scores for t in tables]).astype(np.float64)
    centered = data - data.mean(axis=1, keepdims=True)
    norms = np.sqrt((centered ** 2).sum(axis=1))
    k = len(tables)
    out = np.full((k, k), np.nan)
    ok = norms > 0
    for i in range(k):
        if not ok[i]:
            continue
        for j in range(i, k):
            if not ok[j]:
                continue
            r = 1.0 if i == j else float(centered[i] @ centered[j] / (norms[i] * norms[j]))
            out[i, j] = out[j, i] = min(1.0, max(-1.0, r))
    return out
