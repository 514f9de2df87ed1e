"""CSV and JSON artifacts.

Floats are written with ``repr`` so that files round-trip exactly and repeated
runs produce identical bytes. Every file is written to a temporary sibling and
renamed into place.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile

import numpy as np

from .errors import ParseError
from .predictor import ActivityPrediction
from .stream import NodeIndex

__all__ = [
    "atomic_write",
    "fmt",
    "scores_csv",
    "correlation_csv",
    "predictions_csv",
    "read_predictions",
    "trace_csv",
    "weights_csv",
    "sweep_csv",
    "histogram_csv",
    "summary_csv",
    "report_json",
]


def atomic_write(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "NA"
    return repr(x)


def _csv(rows, header=None, comments=()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def scores_csv(tables) -> str:
    rows = []
    for t in tables:
        for pair, raw, score in zip(t.pairs(), t.raw.tolist(), t.scores.tolist()):
            rows.append((t.metric.name, str(pair.a), str(pair.b), raw, score))
    return _csv(rows, ["metric", "u", "v", "raw", "normalized"])


def correlation_csv(names, matrix) -> str:
    names = [str(n) for n in names]
    rows = [[name, *row] for name, row in zip(names, np.asarray(matrix).tolist())]
    return _csv(rows, ["metric", *names])


def _weights_comment(weights) -> str:
    if weights and all(isinstance(v, dict) for v in weights.values()):
        parts = []
        for cls, w in weights.items():
            parts.append(f"{cls}[" + ";".join(f"{k}={fmt(v)}" for k, v in w.items()) + "]")
        return "weights: " + " ".join(parts)
    return "weights: " + ";".join(f"{k}={fmt(v)}" for k, v in (weights or {}).items())


def predictions_csv(pred: ActivityPrediction, weights=None) -> str:
    rows = [(str(p.a), str(p.b), c) for p, c in zip(pred.pairs(), pred.values.tolist())]
    comments = [f"N={fmt(pred.budget)}", _weights_comment(weights)]
    return _csv(rows, ["u", "v", "predicted_count"], comments)


def read_predictions(path, nodes: NodeIndex) -> ActivityPrediction:
    """Read ``u,v,predicted_count`` rows; pairs must use nodes of ``nodes``."""
    budget = None
    codes, values = [], []
    seen_header = False
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                body = text[1:].strip()
                if body.startswith("N="):
                    try:
                        budget = float(body[2:])
                    except ValueError:
                        raise ParseError(f"bad budget comment {text!r}", lineno, "export") from None
                continue
            fields = next(csv.reader([text]))
            if not seen_header and fields[:3] == ["u", "v", "predicted_count"]:
                seen_header = True
                continue
            if len(fields) != 3:
                raise ParseError(f"expected 'u,v,predicted_count', got {text!r}", lineno, "export")
            u, v, count = fields
            try:
                value = float(count)
            except ValueError:
                raise ParseError(f"unparseable count {count!r}", lineno, "export") from None
            if not math.isfinite(value) or value < 0:
                raise ParseError(f"predicted count must be finite and >= 0, got {count}", lineno, "export")
            try:
                codes.append(nodes.encode(u, v))
            except KeyError as exc:
                raise ParseError(f"node {exc.args[0]!r} is not in the node set", lineno, "export") from None
            except ValueError as exc:
                raise ParseError(str(exc), lineno, "export") from None
            values.append(value)
    codes = np.array(codes, dtype=np.int64)
    values = np.array(values, dtype=np.float64)
    order = np.argsort(codes, kind="stable")
    codes, values = codes[order], values[order]
    if len(codes) > 1 and np.any(codes[1:] == codes[:-1]):
        raise ParseError("a pair is listed twice", module="export")
    if budget is None:
        budget = float(values.sum())
    return ActivityPrediction(nodes, codes, values, budget)


def trace_csv(names, trace) -> str:
    header = ["restart", "iteration", "objective", "step", *[f"alpha_{n}" for n in names]]
    rows = [(r, it, value, step, *np.asarray(x).tolist()) for r, it, value, step, x in trace]
    return _csv(rows, header)


def weights_csv(weights: dict, stats=None) -> str:
    """``metric,alpha,alpha_mean,alpha_std``; per-class weights get a leading class column.

    ``stats`` maps the same keys to ``(mean, std)`` across restarts.
    """
    stats = stats or {}
    classed = weights and all(isinstance(v, dict) for v in weights.values())
    rows = []
    if classed:
        for cls, w in weights.items():
            for m, a in w.items():
                mean, std = stats.get(cls, {}).get(m, (float("nan"), float("nan")))
                rows.append((cls, str(m), a, mean, std))
        return _csv(rows, ["class", "metric", "alpha", "alpha_mean", "alpha_std"])
    for m, a in weights.items():
        mean, std = stats.get(m, (float("nan"), float("nan")))
        rows.append((str(m), a, mean, std))
    return _csv(rows, ["metric", "alpha", "alpha_mean", "alpha_std"])


def sweep_csv(rows) -> str:
    return _csv([(r.alpha, r.f_all, r.f_new, r.f_recurrent, r.degenerate) for r in rows],
                ["alpha", "f_all", "f_new", "f_recurrent", "degenerate"])


def histogram_csv(bins) -> str:
    return _csv(bins, ["bin_start", "count"])


def summary_csv(report, label="all") -> str:
    header = ["label", "precision", "recall", "f_score", "tp", "fp", "fn",
              "predicted_total", "actual_total"]

    def row(name, r):
        return (name, r.precision, r.recall, r.f_score, r.confusion.tp, r.confusion.fp,
                r.confusion.fn_, r.predicted_total, r.actual_total)

    rows = [row(label, report)] + [row(k, v) for k, v in report.breakdowns.items()]
    return _csv(rows, header)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return None if math.isnan(x) else x
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def report_json(data: dict) -> str:
    return json.dumps(_jsonable(data), indent=2, allow_nan=False) + "\n"
