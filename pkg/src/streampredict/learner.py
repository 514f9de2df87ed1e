"""Hold-out periods and weight learning.

Weights are learned by projected finite-difference gradient ascent on the
validation F-score, restarted from several random points in ``[0, 1]^M``.
Metric tables are computed once per observation stream
(:class:`ObjectiveProblem`); each objective evaluation is then only a
weighted sum, an allocation and a confusion count.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .errors import ConfigError
from .evaluation import macro_f, prf, Confusion
from .metrics import parse_metric, score_all
from .predictor import combine, extrapolate_total
from .stream import Interval, LinkStream

__all__ = [
    "PeriodSchedule",
    "LearnerConfig",
    "ObjectiveProblem",
    "OptimizeResult",
    "split_periods",
    "objective",
    "optimize",
    "train",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PeriodSchedule:
    """Training ``[A1, O1]``, validation/observation ``[A2, O2]`` and prediction ``[A', O']``.

    Requires ``O1 == A2 <= O2 <= A' < O'``.
    """

    training: Interval
    validation: Interval
    prediction: Interval

    def __post_init__(self):
        for name in ("training", "validation", "prediction"):
            value = getattr(self, name)
            if not isinstance(value, Interval):
                object.__setattr__(self, name, Interval(*value))
        t, v, p = self.training, self.validation, self.prediction
        if t.length <= 0 or v.length <= 0 or p.length <= 0:
            raise ConfigError("every schedule period needs a positive length", module="learner")
        if t.end != v.start:
            raise ConfigError(f"training must end where validation starts ({t.end} != {v.start})",
                              module="learner")
        if v.end > p.start:
            raise ConfigError(f"prediction must start at or after validation ends ({p.start} < {v.end})",
                              module="learner")

    @classmethod
    def contiguous(cls, start: float, duration: float) -> "PeriodSchedule":
        """Three back-to-back periods of equal ``duration`` from ``start``."""
        return cls(Interval(start, start + duration),
                   Interval(start + duration, start + 2 * duration),
                   Interval(start + 2 * duration, start + 3 * duration))

    def to_dict(self) -> dict:
        return {k: [getattr(self, k).start, getattr(self, k).end]
                for k in ("training", "validation", "prediction")}


OBJECTIVES = ("overall_f", "macro_f")


@dataclass(frozen=True)
class LearnerConfig:
    restarts: int = 10
    max_iterations: int = 200
    initial_step: float = 0.1
    step_shrink: float = 0.5
    min_step: float = 1e-4
    fd_epsilon: float = 1e-4
    seed: int = 0
    objective: str = "overall_f"

    def __post_init__(self):
        problems = []
        if int(self.restarts) < 1:
            problems.append("restarts must be >= 1")
        if int(self.max_iterations) < 0:
            problems.append("max_iterations must be >= 0")
        if not self.initial_step > 0:
            problems.append("initial_step must be > 0")
        if not 0 < self.step_shrink < 1:
            problems.append("step_shrink must be in (0, 1)")
        if not self.min_step > 0:
            problems.append("min_step must be > 0")
        if not self.fd_epsilon > 0:
            problems.append("fd_epsilon must be > 0")
        if self.objective not in OBJECTIVES:
            problems.append(f"objective must be one of {OBJECTIVES}")
        if problems:
            raise ConfigError("; ".join(problems), module="learner")

    def to_dict(self) -> dict:
        return asdict(self)


def split_periods(stream: LinkStream, schedule: PeriodSchedule) -> tuple[LinkStream, LinkStream]:
    """Training and validation/observation sub-streams."""
    for name, window in (("training", schedule.training), ("validation", schedule.validation)):
        if window.end < stream.start or window.start > stream.end:
            raise ConfigError(f"{name} period [{window.start}, {window.end}] lies outside the "
                              f"stream interval [{stream.start}, {stream.end}]", module="learner")
    return stream.slice(schedule.training), stream.slice(schedule.validation)


class ObjectiveProblem:
    """Cached pipeline from weights to the F-score of predicting ``target`` from ``observed``.

    With ``labeler`` (codes -> class label array) and ``class_names``, the weight
    vector is the concatenation of one block of ``len(metrics)`` weights per
    class and the score is the harmonic mean of the class F-scores
    (``aggregate="macro_f"``) or the overall F-score (``"overall_f"``).
    """

    def __init__(self, observed: LinkStream, target: LinkStream, metrics, *, labeler=None,
                 class_names=None, tables=None, aggregate="macro_f"):
        if observed.nodes != target.nodes:
            raise ValueError("observed and target streams must share their node set")
        self.metrics = [parse_metric(m) for m in metrics]
        if tables is None:
            tables = score_all(observed, self.metrics)
        self.tables = tables
        cand = tables[0].codes if tables else observed.candidate_codes()
        act_codes, act_counts = target.pair_counts()
        codes = np.union1d(cand, act_codes)
        self.codes = codes
        pos = np.searchsorted(codes, cand)
        self.columns = []
        for t in tables:
            col = np.zeros(len(codes))
            col[pos] = t.scores
            self.columns.append(col)
        self.actual = np.zeros(len(codes))
        self.actual[np.searchsorted(codes, act_codes)] = act_counts
        self.budget = extrapolate_total(observed, target.interval)
        if aggregate not in OBJECTIVES:
            raise ConfigError(f"unknown objective {aggregate!r}", module="learner")
        self.aggregate = aggregate
        self.class_names = list(class_names or [])
        self.class_masks = []
        if labeler is not None:
            labels = np.asarray(labeler(codes))
            if not self.class_names:
                self.class_names = sorted(set(labels.tolist()))
            self.class_masks = [labels == c for c in self.class_names]
        self.class_columns = [[col[mask] for col in self.columns] for mask in self.class_masks]
        self.class_actual = [self.actual[mask] for mask in self.class_masks]
        self.evaluations = 0

    @property
    def dimension(self) -> int:
        return len(self.metrics) * max(1, len(self.class_names))

    def index(self, alphas) -> np.ndarray:
        alphas = np.asarray(alphas, dtype=np.float64)
        m = len(self.metrics)
        if not self.class_masks:
            out = combine(alphas.tolist(), self.columns)
            return np.zeros(len(self.codes)) if out is None else out
        out = np.zeros(len(self.codes))
        for c, mask in enumerate(self.class_masks):
            block = alphas[c * m:(c + 1) * m].tolist()
            part = combine(block, self.class_columns[c])
            if part is not None:
                out[mask] = part
        return out

    def predict(self, alphas) -> np.ndarray | None:
        """Allocated counts aligned with ``codes``; ``None`` for a degenerate index."""
        idx = self.index(alphas)
        total = float(idx.sum())
        if total <= 0:
            return None
        return self.budget * (idx / total)

    def scores(self, alphas) -> dict:
        """Overall F and per-class F for a weight vector."""
        pred = self.predict(alphas)
        if pred is None:
            return {"overall": 0.0, **{c: 0.0 for c in self.class_names}}
        out = {"overall": prf(Confusion(*_kernels.confusion_sums(pred, self.actual)))[2]}
        for name, mask in zip(self.class_names, self.class_masks):
            out[name] = prf(Confusion(*_kernels.confusion_sums(pred[mask], self.actual[mask])))[2]
        return out

    def __call__(self, alphas) -> float:
        self.evaluations += 1
        pred = self.predict(alphas)
        if pred is None:
            return 0.0
        if not self.class_masks or self.aggregate == "overall_f":
            return prf(Confusion(*_kernels.confusion_sums(pred, self.actual)))[2]
        fs = [prf(Confusion(*_kernels.confusion_sums(pred[mask], act)))[2]
              for mask, act in zip(self.class_masks, self.class_actual) if mask.any()]
        return macro_f(fs) if fs else 0.0


def objective(weights, observed: LinkStream, target: LinkStream, metrics, classes=None) -> float:
    """Validation score of ``weights`` (a metric -> alpha mapping).

    With ``classes=(labeler, class_names)``, ``weights`` maps every class name
    to its own metric -> alpha mapping and the score is the harmonic mean of
    class F-scores. Degenerate predictions score 0.
    """
    metrics = [parse_metric(m) for m in metrics]
    if classes is None:
        w = {parse_metric(k): float(v) for k, v in weights.items()}
        problem = ObjectiveProblem(observed, target, metrics)
        return problem([w.get(m, 0.0) for m in metrics])
    labeler, names = classes
    problem = ObjectiveProblem(observed, target, metrics, labeler=labeler, class_names=names)
    vec = []
    for name in names:
        w = {parse_metric(k): float(v) for k, v in weights[name].items()}
        vec.extend(w.get(m, 0.0) for m in metrics)
    return problem(vec)


@dataclass
class OptimizeResult:
    names: list
    weights: np.ndarray
    value: float
    restart_weights: list = field(default_factory=list)
    restart_values: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    evaluations: int = 0

    def weight_dict(self) -> dict:
        return dict(zip(self.names, self.weights.tolist()))

    def weight_stats(self) -> tuple[np.ndarray, np.ndarray]:
        arr = np.array(self.restart_weights)
        return arr.mean(axis=0), arr.std(axis=0)


def _ascend(f, x, config: LearnerConfig, restart: int, trace: list):
    eps = config.fd_epsilon
    step = config.initial_step
    value = f(x)
    trace.append((restart, 0, value, step, x.copy()))
    for it in range(1, config.max_iterations + 1):
        if step < config.min_step:
            break
        grad = np.empty_like(x)
        for i in range(len(x)):
            probe = x.copy()
            probe[i] += eps
            grad[i] = (f(probe) - value) / eps
        # coordinates pinned at zero cannot move further down
        grad[(x <= 0) & (grad < 0)] = 0.0
        norm = float(np.sqrt(grad @ grad))
        if norm == 0.0:
            break
        cand = np.maximum(x + step * (grad / norm), 0.0)
        cand_value = f(cand)
        if cand_value >= value:
            x, value = cand, cand_value
        else:
            step *= config.step_shrink
        trace.append((restart, it, value, step, x.copy()))
    return x, value


def optimize(config: LearnerConfig, objective_fn, names) -> OptimizeResult:
    """Maximise ``objective_fn`` over non-negative weight vectors.

    ``objective_fn`` takes a 1-D array aligned with ``names``. Each restart
    draws its start uniformly in ``[0, 1]^M`` from a seed derived from
    ``config.seed``; a step is accepted only when the objective does not
    decrease, otherwise the step length shrinks.
    """
    names = list(names)
    if not names:
        raise ConfigError("optimize needs at least one weight", module="learner")
    seeds = np.random.SeedSequence(config.seed).spawn(config.restarts)
    calls = 0

    def f(x):
        nonlocal calls
        calls += 1
        return float(objective_fn(x))

    result = OptimizeResult(names, None, -np.inf)
    for r, seq in enumerate(seeds):
        rng = np.random.default_rng(seq)
        x0 = rng.uniform(0.0, 1.0, size=len(names))
        x, value = _ascend(f, x0, config, r, result.trace)
        result.restart_weights.append(x)
        result.restart_values.append(value)
        log.debug("restart %d: objective %.6f", r, value)
        if value > result.value:
            result.weights, result.value = x, value
    result.evaluations = calls
    return result


def train(observed: LinkStream, target: LinkStream, metrics, config: LearnerConfig,
          problem: ObjectiveProblem | None = None) -> OptimizeResult:
    """Learn unclassed weights predicting ``target`` from ``observed``."""
    if problem is None:
        problem = ObjectiveProblem(observed, target, metrics)
    return optimize(config, problem, problem.metrics)
