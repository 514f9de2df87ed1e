"""Experiment configuration files.

INI syntax. Paths are resolved relative to the configuration file; the
environment variables ``STREAMPREDICT_OUTPUT_DIR`` and ``STREAMPREDICT_SEED``
override the output directory and the learner seed. Example::

    [data]
    path = infocom.txt
    # node_universe = nodes.txt
    # start = 0
    # end = 345600

    [schedule]
    # either explicit periods ...
    training = 32400 39600
    validation = 39600 46800
    prediction = 46800 54000
    # ... or start + duration for three equal back-to-back periods
    # start = 32400
    # duration = 7200

    [metrics]
    use = CN, SI, WCN, PAE, PAE10L, PAE1000S, PAE10000S

    [learner]
    restarts = 10
    max_iterations = 200
    seed = 0

    [classes]
    enabled = true
    k = 5
    mode = joint

    [output]
    directory = out
    formats = json, csv
"""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields

from .errors import ConfigError
from .learner import LearnerConfig, PeriodSchedule
from .metrics import ALL_METRICS, MetricId, parse_metrics
from .stream import Interval

__all__ = ["ExperimentConfig", "load_config", "config_from_dict"]

FORMATS = ("json", "csv")


@dataclass(frozen=True)
class ExperimentConfig:
    dataset_path: str
    schedule: PeriodSchedule
    metrics: tuple = ALL_METRICS
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    classes_enabled: bool = False
    class_k: int = 5
    class_mode: str = "joint"
    output_dir: str = "out"
    report_formats: tuple = FORMATS
    node_universe_path: str | None = None
    data_interval: Interval | None = None
    sweep_metric_a: MetricId | None = None
    sweep_metric_b: MetricId | None = None
    sweep_points: int = 101
    source: str | None = None

    def __post_init__(self):
        if not self.metrics:
            raise ConfigError("at least one metric is required")
        if len(set(self.metrics)) != len(self.metrics):
            raise ConfigError("duplicate metric in [metrics] use")
        if int(self.class_k) < 1:
            raise ConfigError(f"classes k must be >= 1, got {self.class_k}")
        if self.class_mode not in ("joint", "independent"):
            raise ConfigError(f"classes mode must be joint or independent, got {self.class_mode!r}")
        bad = [f for f in self.report_formats if f not in FORMATS]
        if bad:
            raise ConfigError(f"unknown report format(s) {bad}")
        if self.learner.objective == "macro_f" and not self.classes_enabled:
            raise ConfigError("the macro_f objective needs [classes] enabled = true")
        if self.sweep_points < 2:
            raise ConfigError("sweep points must be >= 2")

    def to_dict(self) -> dict:
        """Fully resolved configuration, embedded in reports."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "metrics":
                value = [m.name for m in value]
            elif f.name in ("schedule", "learner"):
                value = value.to_dict()
            elif isinstance(value, Interval):
                value = [value.start, value.end]
            elif isinstance(value, MetricId):
                value = value.name
            elif isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out


def _interval(text, key):
    parts = str(text).replace(",", " ").split()
    if len(parts) != 2:
        raise ConfigError(f"[schedule] {key} needs two timestamps, got {text!r}")
    try:
        return Interval(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ConfigError(f"[schedule] {key}: {exc}") from None


def _list(text):
    return [x for x in str(text).replace(",", " ").split() if x]


def config_from_dict(sections: dict, base_dir: str = ".", env=None, source=None) -> ExperimentConfig:
    """Build a config from ``{section: {key: value}}`` (the parsed INI layout)."""
    env = os.environ if env is None else env
    sec = {k.lower(): {kk.lower(): vv for kk, vv in v.items()} for k, v in sections.items()}
    known = {"data", "schedule", "metrics", "learner", "classes", "output", "sweep"}
    unknown = set(sec) - known
    if unknown:
        raise ConfigError(f"unknown section(s) {sorted(unknown)}")

    def path(value):
        value = os.path.expanduser(str(value))
        return value if os.path.isabs(value) else os.path.normpath(os.path.join(base_dir, value))

    try:
        data = sec.get("data", {})
        if "path" not in data:
            raise ConfigError("[data] path is required")
        interval = None
        if "start" in data or "end" in data:
            if not ("start" in data and "end" in data):
                raise ConfigError("[data] start and end must be given together")
            interval = Interval(float(data["start"]), float(data["end"]))

        sch = sec.get("schedule", {})
        if {"training", "validation", "prediction"} <= set(sch):
            schedule = PeriodSchedule(_interval(sch["training"], "training"),
                                      _interval(sch["validation"], "validation"),
                                      _interval(sch["prediction"], "prediction"))
        elif {"start", "duration"} <= set(sch):
            schedule = PeriodSchedule.contiguous(float(sch["start"]), float(sch["duration"]))
        else:
            raise ConfigError("[schedule] needs training/validation/prediction or start/duration")

        met = sec.get("metrics", {})
        metrics = tuple(parse_metrics(met["use"])) if "use" in met else ALL_METRICS

        lrn = dict(sec.get("learner", {}))
        if "STREAMPREDICT_SEED" in env:
            lrn["seed"] = env["STREAMPREDICT_SEED"]
        kinds = {f.name: f.type for f in fields(LearnerConfig)}
        unknown = set(lrn) - set(kinds)
        if unknown:
            raise ConfigError(f"unknown [learner] key(s) {sorted(unknown)}")
        casts = {"restarts": int, "max_iterations": int, "seed": int, "objective": str}
        learner = LearnerConfig(**{k: casts.get(k, float)(v) for k, v in lrn.items()})

        cls = sec.get("classes", {})
        enabled = str(cls.get("enabled", "false")).strip().lower() in ("1", "true", "yes", "on")
        if enabled and learner.objective == "overall_f" and "objective" not in lrn:
            learner = LearnerConfig(**{**learner.to_dict(), "objective": "macro_f"})

        out = sec.get("output", {})
        outdir = env.get("STREAMPREDICT_OUTPUT_DIR") or out.get("directory", "out")

        sw = sec.get("sweep", {})
        metric_a = parse_metrics([sw["metric_a"]])[0] if "metric_a" in sw else None
        metric_b = parse_metrics([sw["metric_b"]])[0] if "metric_b" in sw else None

        return ExperimentConfig(
            dataset_path=path(data["path"]),
            schedule=schedule,
            metrics=metrics,
            learner=learner,
            classes_enabled=enabled,
            class_k=int(cls.get("k", 5)),
            class_mode=str(cls.get("mode", "joint")).strip(),
            output_dir=path(outdir),
            report_formats=tuple(_list(out.get("formats", "json, csv"))),
            node_universe_path=path(data["node_universe"]) if data.get("node_universe") else None,
            data_interval=interval,
            sweep_metric_a=metric_a,
            sweep_metric_b=metric_b,
            sweep_points=int(sw.get("points", 101)),
            source=source,
        )
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, env=None) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    sections = {name: dict(parser[name]) for name in parser.sections()}
    base = os.path.dirname(os.path.abspath(path))
    return config_from_dict(sections, base, env, source=os.path.abspath(path))
