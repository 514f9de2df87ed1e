import json
import os
import subprocess
import sys

import pytest

from streampredict import ConfigError, Interval, PipelineError
from streampredict.cli import EXIT_CONFIG, EXIT_PARSE, EXIT_PIPELINE, main
from streampredict.config import config_from_dict, load_config
from streampredict.pipeline import evaluate_predictions, run_experiment

from conftest import periodic_links, random_links

CONFIG = """\
[data]
path = links.txt

[schedule]
start = 0
duration = 100

[metrics]
use = {metrics}

[learner]
restarts = 2
max_iterations = 60
seed = 5

[classes]
enabled = {classes}
k = 2

[output]
directory = out
"""


def _write_dataset(path, links):
    with open(path, "w") as fh:
        fh.write("# t u v\n")
        for t, u, v in links:
            fh.write(f"{t!r} {u} {v}\n")


def _project(tmp_path, links=None, metrics="CN, SI, PAE, PAE10L", classes="false", extra=""):
    links = links if links is not None else periodic_links(periods=3)
    _write_dataset(tmp_path / "links.txt", links)
    cfg = tmp_path / "exp.ini"
    cfg.write_text(CONFIG.format(metrics=metrics, classes=classes) + extra)
    return cfg


def _noisy_links():
    import random
    rng = random.Random(12)
    return sorted(random_links(rng, n_nodes=10, n_links=150, horizon=300.0))


def test_config_resolution(tmp_path, monkeypatch):
    cfg = _project(tmp_path)
    monkeypatch.delenv("STREAMPREDICT_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("STREAMPREDICT_SEED", raising=False)
    c = load_config(cfg)
    assert c.dataset_path == str(tmp_path / "links.txt")
    assert c.output_dir == str(tmp_path / "out")
    assert c.schedule.prediction == Interval(200, 300)
    assert [m.name for m in c.metrics] == ["CN", "SI", "PAE", "PAE10L"]
    assert c.learner.seed == 5 and c.learner.restarts == 2
    d = c.to_dict()
    assert d["metrics"] == ["CN", "SI", "PAE", "PAE10L"] and d["schedule"]["training"] == [0, 100]


def test_env_overrides(tmp_path):
    cfg = _project(tmp_path)
    c = load_config(cfg, env={"STREAMPREDICT_OUTPUT_DIR": str(tmp_path / "elsewhere"),
                              "STREAMPREDICT_SEED": "9"})
    assert c.output_dir == str(tmp_path / "elsewhere") and c.learner.seed == 9


def test_classes_default_to_macro_objective(tmp_path):
    c = load_config(_project(tmp_path, classes="true"), env={})
    assert c.classes_enabled and c.learner.objective == "macro_f"


@pytest.mark.parametrize("sections", [
    {"schedule": {"start": "0", "duration": "10"}},
    {"data": {"path": "x"}},
    {"data": {"path": "x"}, "schedule": {"start": "0", "duration": "10"}, "bogus": {}},
    {"data": {"path": "x"}, "schedule": {"start": "0", "duration": "10"},
     "metrics": {"use": "CN, CN"}},
    {"data": {"path": "x"}, "schedule": {"start": "0", "duration": "10"},
     "learner": {"objective": "macro_f"}},
    {"data": {"path": "x"}, "schedule": {"start": "0", "duration": "-1"}},
    {"data": {"path": "x"}, "schedule": {"start": "0", "duration": "10"},
     "learner": {"restarts": "many"}},
    {"data": {"path": "x"}, "schedule": {"start": "0", "duration": "10"},
     "classes": {"enabled": "true", "k": "0"}},
])
def test_config_errors(sections):
    with pytest.raises(ConfigError):
        config_from_dict(sections, env={})


def test_run_periodic_reaches_perfect_f(tmp_path):
    config = load_config(_project(tmp_path), env={})
    result = run_experiment(config)
    assert result.report.f_score == 1.0
    assert result.prediction.budget == 8.0
    names = sorted(os.path.basename(f) for f in result.files)
    assert names == ["predictions.csv", "report.json", "summary.csv", "trace.csv", "weights.csv"]
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["evaluation"]["f_score"] == 1.0
    assert report["config"]["learner"]["seed"] == 5
    assert report["realizations"]["realizations"] == 2


def _outputs(out):
    return {name: (out / name).read_bytes() for name in sorted(os.listdir(out))}


@pytest.mark.parametrize("classes", ["false", "true"])
def test_runs_are_byte_identical(tmp_path, classes):
    cfg = _project(tmp_path, links=_noisy_links(), classes=classes)
    assert main(["run", str(cfg)]) == 0
    first = _outputs(tmp_path / "out")
    assert main(["run", str(cfg)]) == 0
    assert _outputs(tmp_path / "out") == first
    assert set(first) >= {"weights.csv", "trace.csv", "predictions.csv", "report.json"}


def test_evaluate_reproduces_in_memory_report(tmp_path):
    config = load_config(_project(tmp_path, links=_noisy_links()), env={})
    result = run_experiment(config)
    again = evaluate_predictions(config, tmp_path / "out" / "predictions.csv")
    assert again.to_dict() == result.report.to_dict()


def test_evaluate_ground_truth_file_scores_one(tmp_path, capsys):
    cfg = _project(tmp_path)
    truth = tmp_path / "truth.csv"
    truth.write_text("u,v,predicted_count\na,b,4\na,c,2\nb,d,1\nc,d,1\n")
    assert main(["evaluate", str(truth), str(cfg)]) == 0
    assert "F-score 1.0000" in capsys.readouterr().out
    assert (tmp_path / "out" / "evaluation.json").exists()


def test_predict_only_without_ground_truth(tmp_path):
    links = periodic_links(periods=2)
    cfg = _project(tmp_path, links=links)
    config = load_config(cfg, env={})
    with pytest.raises(PipelineError):
        run_experiment(config, write=False)
    result = run_experiment(config, predict_only=True)
    assert result.report is None
    assert main(["run", str(cfg), "--predict-only"]) == 0
    assert not (tmp_path / "out" / "summary.csv").exists()


def test_delta_warning(tmp_path):
    links = [(float(t), "a", "b") for t in range(0, 300, 120)] + \
            [(float(t) + 60, "a", "c") for t in range(0, 300, 120)]
    cfg = _project(tmp_path, links=links, metrics="CN, PAE, PAE10S")
    result = run_experiment(load_config(cfg, env={}), write=False)
    assert any("PAE10S" in w for w in result.warnings)


def test_exit_codes(tmp_path, capsys):
    cfg = _project(tmp_path)
    with pytest.raises(SystemExit) as info:
        main(["frobnicate", str(cfg)])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["run", str(cfg), "--bogus"])
    assert info.value.code == 2
    assert main(["run", str(tmp_path / "missing.ini")]) == EXIT_CONFIG
    (tmp_path / "links.txt").write_text("1 a b\n2 a\n")
    assert main(["run", str(cfg)]) == EXIT_PARSE
    assert "line 2" in capsys.readouterr().err
    _write_dataset(tmp_path / "links.txt", periodic_links(periods=2))
    assert main(["run", str(cfg)]) == EXIT_PIPELINE


def test_subcommands(tmp_path, capsys):
    cfg = _project(tmp_path, links=_noisy_links(),
                   extra="\n[sweep]\nmetric_a = PAE1000S\nmetric_b = CN\npoints = 11\n")
    out = tmp_path / "out"
    assert main(["score", str(cfg)]) == 0
    header = (out / "scores_observation.csv").read_text().splitlines()[0]
    assert header == "metric,u,v,raw,normalized"
    assert main(["correlate", str(cfg)]) == 0
    rows = [r.split(",") for r in (out / "correlation_training.csv").read_text().splitlines()]
    names = rows[0][1:]
    for i, row in enumerate(rows[1:]):
        cell = row[1 + i]
        assert cell == "NA" or float(cell) == pytest.approx(1.0)
        for j, other in enumerate(rows[1:]):
            assert row[1 + j] == other[1 + i]
    assert len(names) == 4
    assert main(["histogram", str(cfg), "--granularity", "50"]) == 0
    bins = (out / "histogram_full.csv").read_text().splitlines()[1:]
    assert sum(int(b.split(",")[1]) for b in bins) == 150
    assert main(["sweep", str(cfg)]) == 0
    lines = (out / "sweep_PAE1000S_CN.csv").read_text().splitlines()
    assert lines[0] == "alpha,f_all,f_new,f_recurrent,degenerate" and len(lines) == 12
    assert main(["sweep", str(cfg), "--metric-a", "PAE", "--metric-b", "SI", "--points", "3"]) == 0
    assert (out / "sweep_PAE_SI.csv").exists()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "streampredict", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "streampredict" in proc.stdout
