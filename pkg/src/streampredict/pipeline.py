"""End-to-end experiments: load, split, train, predict, evaluate, write artifacts."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field

import numpy as np

from . import export
from .classes import CLASS_NAMES, activity_class_labels, classed_predict, classed_train
from .config import ExperimentConfig
from .errors import ConfigError, DegenerateIndexError, PipelineError
from .evaluation import EvaluationReport, category_labels, evaluate, summarize_realizations
from .learner import ObjectiveProblem, optimize, split_periods
from .metrics import correlation_matrix, score_all
from .predictor import ActivityPrediction, PairMap, allocate, extrapolate_total, prediction_index
from .stream import LinkStream, read_node_universe, read_stream
from .sweep import SweepSpec, default_alphas, run_sweep

__all__ = [
    "ExperimentResult",
    "load_dataset",
    "run_experiment",
    "evaluate_predictions",
    "score_tables",
    "correlate",
    "histogram",
    "sweep",
]

log = logging.getLogger(__name__)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    weights: dict
    prediction: ActivityPrediction
    report: EvaluationReport | None
    summary: dict
    files: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


def load_dataset(config: ExperimentConfig) -> LinkStream:
    universe = None
    if config.node_universe_path:
        try:
            universe = read_node_universe(config.node_universe_path)
        except OSError as exc:
            raise ConfigError(f"cannot read node universe {config.node_universe_path}: "
                              f"{exc.strerror}") from None
    try:
        return read_stream(config.dataset_path, universe, config.data_interval)
    except OSError as exc:
        raise ConfigError(f"cannot read dataset {config.dataset_path}: {exc.strerror}") from None


def _delta_warnings(config, stream):
    out = []
    gap = stream.min_time_gap
    for m in config.metrics:
        if m.kind == "PAE_DELTA_S" and m.param < gap:
            out.append(f"{m.name}: delta {m.param:g}s is below the stream's minimum "
                       f"inter-event gap ({gap:g}s); the metric is mostly zero")
    return out


def _ground_truth(config, stream):
    window = config.schedule.prediction
    if stream.end < window.start:
        raise PipelineError(f"no ground truth: the dataset ends at {stream.end:g}, before the "
                            f"prediction period starts at {window.start:g}")
    warnings = []
    if stream.end < window.end:
        warnings.append(f"the dataset ends at {stream.end:g}, inside the prediction period "
                        f"ending at {window.end:g}; ground truth is truncated")
    return stream.slice(window), warnings


def _labelers(config, observed):
    return [category_labels(observed), activity_class_labels(observed, config.class_k)]


def _predict(config, observed, weights, tables):
    budget = extrapolate_total(observed, config.schedule.prediction)
    if config.classes_enabled:
        return classed_predict(observed, weights, config.class_k, config.metrics, budget, tables)
    return allocate(budget, prediction_index(weights, tables))


def _write(config, name, text, files):
    path = os.path.join(config.output_dir, name)
    export.atomic_write(path, text)
    files.append(path)


def run_experiment(config: ExperimentConfig, predict_only: bool = False,
                   write: bool = True) -> ExperimentResult:
    """Train on (training -> validation), predict the prediction period from validation.

    With ``predict_only`` the prediction is produced without ground truth and
    no evaluation is made.
    """
    stream = load_dataset(config)
    warnings = _delta_warnings(config, stream)
    truth = None
    if not predict_only:
        truth, more = _ground_truth(config, stream)
        warnings += more
    for w in warnings:
        log.warning(w)

    train_stream, observed = split_periods(stream, config.schedule)
    if len(train_stream) == 0 or len(observed) == 0:
        raise PipelineError("training or validation period contains no links")
    metrics = list(config.metrics)

    if config.classes_enabled:
        trained = classed_train(train_stream, observed, config.class_k, metrics,
                                config.learner, config.class_mode)
        weights = {c: {m.name: a for m, a in w.items()} for c, w in trained.weights.items()}
        opt = trained.result
        training = {"validation_objective": trained.value, "fallback": trained.fallback}
    else:
        problem = ObjectiveProblem(train_stream, observed, metrics)
        opt = optimize(config.learner, problem, metrics)
        weights = {m.name: a for m, a in opt.weight_dict().items()}
        trained = None
        training = {"validation_objective": opt.value}
    training["restart_values"] = list(opt.restart_values)
    training["evaluations"] = opt.evaluations

    tables = score_all(observed, metrics)
    prediction = _predict(config, observed, weights, tables)

    report = None
    summary = {
        "config": config.to_dict(),
        "budget": prediction.budget,
        "weights": weights,
        "training": training,
        "warnings": warnings,
    }
    if truth is not None:
        actual = PairMap.from_stream(truth)
        labelers = _labelers(config, observed)
        report = evaluate(prediction, actual, labelers)
        summary["evaluation"] = report.to_dict()
        runs = []
        for vec in opt.restart_weights:
            w = _restart_weights(vec, metrics, trained)
            if w is None:
                runs = []
                break
            try:
                pred = _predict(config, observed, w, tables)
            except DegenerateIndexError:
                pred = PairMap(actual.nodes, np.zeros(0, dtype=np.int64), np.zeros(0))
            runs.append(evaluate(pred, actual, labelers))
        if runs:
            summary["realizations"] = summarize_realizations(runs)

    files = []
    if write:
        if config.classes_enabled:
            stats = _class_stats(opt, metrics, trained)
        else:
            mean, std = opt.weight_stats()
            stats = {m.name: (a, s) for m, a, s in zip(metrics, mean.tolist(), std.tolist())}
        _write(config, "weights.csv", export.weights_csv(weights, stats), files)
        _write(config, "trace.csv", export.trace_csv([str(n) for n in opt.names], opt.trace), files)
        _write(config, "predictions.csv", export.predictions_csv(prediction, weights), files)
        if "json" in config.report_formats:
            _write(config, "report.json", export.report_json(summary), files)
        if "csv" in config.report_formats and report is not None:
            _write(config, "summary.csv", export.summary_csv(report), files)
    return ExperimentResult(config, weights, prediction, report, summary, files, warnings)


def _restart_weights(vec, metrics, trained):
    """Weights of one restart in the shape ``_predict`` expects, or None if not separable."""
    if trained is None:
        return {m.name: a for m, a in zip(metrics, np.asarray(vec).tolist())}
    names = trained.result.names
    if trained.fallback and len(trained.fallback) == len(CLASS_NAMES):
        return {c: {m.name: a for m, a in zip(metrics, np.asarray(vec).tolist())}
                for c in CLASS_NAMES}
    if len(vec) != len(names):
        return None
    out = {}
    for name, a in zip(names, np.asarray(vec).tolist()):
        cls, metric = str(name).split(":", 1)
        out.setdefault(cls, {})[metric] = a
    for c in CLASS_NAMES:
        if c not in out:
            out[c] = {m.name: a for m, a in trained.weights[c].items()}
    return out


def _class_stats(opt, metrics, trained):
    stats = {c: {} for c in CLASS_NAMES}
    if not opt.restart_weights:
        return stats
    mean, std = opt.weight_stats()
    if trained.fallback and len(trained.fallback) == len(CLASS_NAMES):
        for c in CLASS_NAMES:
            stats[c] = {m.name: (a, s) for m, a, s in zip(metrics, mean.tolist(), std.tolist())}
        return stats
    for name, a, s in zip(opt.names, mean.tolist(), std.tolist()):
        cls, metric = str(name).split(":", 1)
        stats[cls][metric] = (a, s)
    return stats


def evaluate_predictions(config: ExperimentConfig, predictions_path, write: bool = False):
    """Score an external ``u,v,predicted_count`` file against the prediction period."""
    stream = load_dataset(config)
    truth, warnings = _ground_truth(config, stream)
    for w in warnings:
        log.warning(w)
    observed = stream.slice(config.schedule.validation)
    try:
        prediction = export.read_predictions(predictions_path, stream.nodes)
    except OSError as exc:
        raise ConfigError(f"cannot read predictions {predictions_path}: {exc.strerror}") from None
    report = evaluate(prediction, PairMap.from_stream(truth), _labelers(config, observed))
    if write:
        files = []
        if "json" in config.report_formats:
            _write(config, "evaluation.json", export.report_json(report.to_dict()), files)
        if "csv" in config.report_formats:
            _write(config, "evaluation_summary.csv", export.summary_csv(report), files)
    return report


def _stream_for(config, stream, which):
    if which == "training":
        return stream.slice(config.schedule.training)
    if which in ("validation", "observation"):
        return stream.slice(config.schedule.validation)
    if which == "full":
        return stream
    raise ConfigError(f"unknown stream selector {which!r}")


def score_tables(config: ExperimentConfig, which="observation", write=True):
    stream = _stream_for(config, load_dataset(config), which)
    tables = score_all(stream, config.metrics)
    if write:
        _write(config, f"scores_{which}.csv", export.scores_csv(tables), [])
    return tables


def correlate(config: ExperimentConfig, which="training", write=True):
    stream = _stream_for(config, load_dataset(config), which)
    tables = score_all(stream, config.metrics)
    matrix = correlation_matrix(tables)
    if write:
        _write(config, f"correlation_{which}.csv",
               export.correlation_csv([t.metric.name for t in tables], matrix), [])
    return [t.metric for t in tables], matrix


def histogram(config: ExperimentConfig, granularity: float, which="full", write=True):
    stream = _stream_for(config, load_dataset(config), which)
    bins = stream.activity_histogram(granularity)
    if write:
        _write(config, f"histogram_{which}.csv", export.histogram_csv(bins), [])
    return bins


def sweep(config: ExperimentConfig, metric_a=None, metric_b=None, points=None, write=True):
    metric_a = metric_a or config.sweep_metric_a
    metric_b = metric_b or config.sweep_metric_b
    if metric_a is None or metric_b is None:
        raise ConfigError("sweep needs metric_a and metric_b")
    spec = SweepSpec(metric_a, metric_b, tuple(default_alphas(points or config.sweep_points)))
    stream = load_dataset(config)
    truth, warnings = _ground_truth(config, stream)
    observed = stream.slice(config.schedule.validation)
    budget = extrapolate_total(observed, config.schedule.prediction)
    rows = run_sweep(spec, observed, truth, budget)
    if write:
        _write(config, f"sweep_{spec.metric_a.name}_{spec.metric_b.name}.csv",
               export.sweep_csv(rows), [])
    return rows
