"""Activity classes of node pairs and per-class weights.

Pairs are split by their link count in a reference stream: ``C1`` never
interacted, ``C2`` has between 1 and ``k`` links, ``C3`` more than ``k``.
Each class gets its own weight vector; the global budget is allocated over the
index assembled from all classes, so budget conservation still holds.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateIndexError
from .learner import LearnerConfig, ObjectiveProblem, OptimizeResult, optimize
from .metrics import parse_metric, score_all
from .predictor import PairMap, allocate, check_weights, combine
from .stream import LinkStream, NodePair

__all__ = [
    "CLASS_NAMES",
    "ClassPartition",
    "ClassedTraining",
    "activity_class_labels",
    "assign_classes",
    "classed_index",
    "classed_predict",
    "classed_train",
]

log = logging.getLogger(__name__)

CLASS_NAMES = ("C1", "C2", "C3")


def _check_k(k):
    if int(k) != k or int(k) < 1:
        raise ConfigError(f"class threshold k must be an integer >= 1, got {k!r}", module="classes")
    return int(k)


def activity_class_labels(reference: LinkStream, k: int):
    """Labeler mapping pair codes to ``C1``/``C2``/``C3`` by activity in ``reference``."""
    k = _check_k(k)
    active, counts = reference.pair_counts()

    def label(codes):
        codes = np.asarray(codes, dtype=np.int64)
        pos = np.searchsorted(active, codes)
        pos_c = np.minimum(pos, max(len(active) - 1, 0))
        found = (pos < len(active)) & (active[pos_c] == codes) if len(active) else np.zeros(len(codes), bool)
        activity = np.where(found, counts[pos_c] if len(active) else 0, 0)
        return np.where(activity == 0, "C1", np.where(activity <= k, "C2", "C3"))

    return label


@dataclass(frozen=True)
class ClassPartition:
    threshold_k: int
    assignment: dict

    def members(self, name) -> set:
        return {p for p, c in self.assignment.items() if c == name}


def assign_classes(reference: LinkStream, pairs, k: int = 5) -> ClassPartition:
    k = _check_k(k)
    assignment = {}
    for pair in pairs:
        pair = NodePair.of(*pair)
        a = reference.pair_activity(pair)
        assignment[pair] = "C1" if a == 0 else ("C2" if a <= k else "C3")
    return ClassPartition(k, assignment)


def classed_index(tables, class_weights: dict, labels) -> PairMap:
    """Per-class linear combination of shared normalised tables.

    ``labels`` gives the class of each code of the (common) table pair set.
    Within a class, metrics are combined in table order exactly as
    :func:`~streampredict.predictor.prediction_index` does, so equal weights in
    every class reproduce the unclassed index bit for bit.
    """
    if not tables:
        raise ConfigError("no score tables", module="classes")
    codes = tables[0].codes
    labels = np.asarray(labels)
    out = np.zeros(len(codes))
    for name in sorted(set(labels.tolist())):
        mask = labels == name
        if name not in class_weights:
            raise ConfigError(f"no weights for non-empty class {name}", module="classes")
        weights = check_weights(class_weights[name])
        missing = [str(m) for m in weights if m not in {t.metric for t in tables}]
        if missing:
            raise ConfigError(f"no score table for weighted metric(s) {', '.join(missing)}",
                              module="classes")
        used = [t for t in tables if t.metric in weights]
        part = combine([weights[t.metric] for t in used], [t.scores[mask] for t in used])
        if part is not None:
            out[mask] = part
    return PairMap(tables[0].nodes, codes, out)


def classed_predict(observed: LinkStream, class_weights: dict, k: int, metrics, budget: float,
                    tables=None):
    """Allocate ``budget`` links with classes reassigned on ``observed``."""
    metrics = [parse_metric(m) for m in metrics]
    if tables is None:
        tables = score_all(observed, metrics)
    labels = activity_class_labels(observed, k)(tables[0].codes)
    index = classed_index(tables, class_weights, labels)
    for name in CLASS_NAMES:
        mask = labels == name
        if mask.any() and float(index.values[mask].sum()) <= 0:
            log.warning("class %s has an all-zero prediction index; it receives no links", name)
    try:
        return allocate(budget, index)
    except DegenerateIndexError:
        raise DegenerateIndexError("every class has an all-zero prediction index",
                                   module="classes") from None


@dataclass
class ClassedTraining:
    weights: dict
    value: float
    result: OptimizeResult | None
    fallback: dict = field(default_factory=dict)
    overall: OptimizeResult | None = None


def _blocks(vector, metrics, names):
    m = len(metrics)
    return {name: dict(zip(metrics, vector[i * m:(i + 1) * m].tolist()))
            for i, name in enumerate(names)}


def classed_train(observed: LinkStream, target: LinkStream, k: int, metrics,
                  config: LearnerConfig, mode: str = "joint") -> ClassedTraining:
    """Learn one weight vector per class against the harmonic mean of class F-scores.

    ``mode="joint"`` ascends the concatenated vector of all class blocks.
    ``mode="independent"`` tunes each class block alone against its own class
    F-score, the other blocks being held at the unclassed weights.
    Classes without candidate pairs in ``observed`` take the unclassed weights.
    """
    if mode not in ("joint", "independent"):
        raise ConfigError(f"unknown class training mode {mode!r}", module="classes")
    metrics = [parse_metric(m) for m in metrics]
    tables = score_all(observed, metrics)
    labeler = activity_class_labels(observed, k)
    cand_labels = labeler(tables[0].codes)
    present = [c for c in CLASS_NAMES if np.any(cand_labels == c)]
    empty = [c for c in CLASS_NAMES if c not in present]

    overall = None
    if empty or mode == "independent" or len(present) < 2:
        base = ObjectiveProblem(observed, target, metrics, tables=tables)
        overall = optimize(config, base, metrics)
    if len(present) < 2:
        weights = {c: overall.weight_dict() for c in CLASS_NAMES}
        fallback = {c: "single populated class; unclassed weights" for c in CLASS_NAMES}
        log.info("classes collapse to %s; training unclassed weights", present or "none")
        return ClassedTraining(weights, overall.value, overall, fallback, overall)

    problem = ObjectiveProblem(observed, target, metrics, labeler=labeler, class_names=present,
                               tables=tables, aggregate=config.objective)
    if mode == "joint":
        names = [f"{c}:{m}" for c in present for m in metrics]
        result = optimize(config, problem, names)
        weights = _blocks(result.weights, metrics, present)
    else:
        m = len(metrics)
        vector = np.tile(overall.weights, len(present))
        trace = []
        for i, name in enumerate(present):
            def class_score(block, i=i):
                full = vector.copy()
                full[i * m:(i + 1) * m] = block
                return problem.scores(full)[present[i]]

            sub = optimize(config, class_score, [f"{name}:{mt}" for mt in metrics])
            for r, it, value, step, block in sub.trace:
                full = vector.copy()
                full[i * m:(i + 1) * m] = block
                trace.append((r, it, value, step, full))
            vector[i * m:(i + 1) * m] = sub.weights
        weights = _blocks(vector, metrics, present)
        result = OptimizeResult([f"{c}:{mt}" for c in present for mt in metrics], vector,
                                problem(vector), trace=trace)

    fallback = {}
    for c in empty:
        weights[c] = overall.weight_dict()
        fallback[c] = "empty on the training stream; unclassed weights"
        log.info("class %s is empty on the training stream; using unclassed weights", c)
    weights = {c: weights[c] for c in CLASS_NAMES}
    final = np.array([weights[c][mt] for c in present for mt in metrics])
    return ClassedTraining(weights, problem(final), result, fallback, overall)
