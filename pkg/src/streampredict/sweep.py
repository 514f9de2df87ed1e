"""Two-metric mixing sweep.

For each ``alpha`` the index is ``alpha * m_a + (1 - alpha) * m_b`` over cached
normalised tables; the allocation is scored overall and on new and recurrent
pairs separately.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateIndexError
from .evaluation import EvaluationReport, category_labels, evaluate
from .metrics import MetricId, parse_metric, score_all
from .predictor import PairMap, allocate, prediction_index
from .stream import LinkStream

__all__ = ["SweepSpec", "SweepRow", "run_sweep", "default_alphas"]


def default_alphas(points: int = 101) -> list[float]:
    return np.linspace(0.0, 1.0, points).tolist()


@dataclass(frozen=True)
class SweepSpec:
    metric_a: MetricId
    metric_b: MetricId
    alphas: tuple = tuple(default_alphas())
    categories: bool = True

    def __post_init__(self):
        object.__setattr__(self, "metric_a", parse_metric(self.metric_a))
        object.__setattr__(self, "metric_b", parse_metric(self.metric_b))
        alphas = tuple(float(a) for a in self.alphas)
        if not alphas:
            raise ConfigError("alpha grid is empty", module="sweep")
        if any(a < 0 or a > 1 for a in alphas):
            raise ConfigError("alphas must lie in [0, 1]", module="sweep")
        if any(b < a for a, b in zip(alphas, alphas[1:])):
            raise ConfigError("alphas must be sorted", module="sweep")
        if self.metric_a == self.metric_b:
            raise ConfigError("sweep needs two distinct metrics", module="sweep")
        object.__setattr__(self, "alphas", alphas)


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    f_all: float
    f_new: float
    f_recurrent: float
    degenerate: bool
    report: EvaluationReport | None = None


def run_sweep(spec: SweepSpec, observed: LinkStream, target: LinkStream, budget: float,
              tables=None) -> list[SweepRow]:
    """Evaluate the two-metric mix on every alpha of ``spec``.

    A degenerate index at some alpha yields a zero row flagged ``degenerate``.
    """
    if tables is None:
        tables = score_all(observed, [spec.metric_a, spec.metric_b])
    actual = PairMap.from_stream(target)
    labelers = [category_labels(observed)] if spec.categories else []
    rows = []
    for alpha in spec.alphas:
        index = prediction_index({spec.metric_a: alpha, spec.metric_b: 1.0 - alpha}, tables)
        try:
            pred = allocate(budget, index)
        except DegenerateIndexError:
            rows.append(SweepRow(alpha, 0.0, 0.0, 0.0, True))
            continue
        report = evaluate(pred, actual, labelers)
        f_new = report.breakdowns["new"].f_score if "new" in report.breakdowns else 0.0
        f_rec = report.breakdowns["recurrent"].f_score if "recurrent" in report.breakdowns else 0.0
        rows.append(SweepRow(alpha, report.f_score, f_new, f_rec, False, report))
    return rows
