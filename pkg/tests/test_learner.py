import numpy as np
import pytest

from streampredict import (ALL_METRICS, ConfigError, Interval, LearnerConfig, LinkStream,
                           ObjectiveProblem, PeriodSchedule, objective, optimize, split_periods,
                           train)
from streampredict import metrics as metrics_mod

from conftest import periodic_stream, random_stream

FAST = LearnerConfig(restarts=3, max_iterations=200, seed=1)


def test_schedule_contract():
    sch = PeriodSchedule.contiguous(0, 5)
    assert (sch.training, sch.validation, sch.prediction) == (
        Interval(0, 5), Interval(5, 10), Interval(10, 15))
    # a gap before the prediction period is legal
    PeriodSchedule(Interval(0, 5), Interval(5, 10), Interval(20, 25))
    with pytest.raises(ConfigError):
        PeriodSchedule(Interval(0, 5), Interval(6, 10), Interval(10, 15))
    with pytest.raises(ConfigError):
        PeriodSchedule(Interval(0, 5), Interval(5, 10), Interval(9, 15))
    with pytest.raises(ConfigError):
        PeriodSchedule(Interval(0, 5), Interval(5, 5), Interval(10, 15))


def test_split_periods_slices():
    links = [(t + 0.5, "a", "b") for t in range(15)]
    s = LinkStream.from_links(links, Interval(0, 15))
    l1, l2 = split_periods(s, PeriodSchedule.contiguous(0, 5))
    assert [l.t for l in l1.links] == [0.5, 1.5, 2.5, 3.5, 4.5]
    assert [l.t for l in l2.links] == [5.5, 6.5, 7.5, 8.5, 9.5]
    with pytest.raises(ConfigError):
        split_periods(s, PeriodSchedule.contiguous(100, 5))


def test_learner_config_validation():
    for bad in ({"restarts": 0}, {"step_shrink": 1.0}, {"initial_step": 0},
                {"min_step": -1}, {"fd_epsilon": 0}, {"objective": "auc"}):
        with pytest.raises(ConfigError):
            LearnerConfig(**bad)


def _periodic_split():
    return split_periods(periodic_stream(), PeriodSchedule.contiguous(0, 100))


def test_objective_examples():
    l1, l2 = _periodic_split()
    assert objective({"PAE": 1}, l1, l2, ["PAE"]) == 1.0
    assert objective({"PAE": 0, "CN": 0}, l1, l2, ["PAE", "CN"]) == 0.0
    assert objective({"PAE": 1}, l1, l2, ["PAE", "CN"]) > objective({"CN": 1}, l1, l2, ["PAE", "CN"])


def test_analytic_objective_single():
    res = optimize(LearnerConfig(restarts=2), lambda a: 1 - (a[0] - 0.5) ** 2, ["x"])
    assert abs(res.weights[0] - 0.5) <= 0.01
    assert res.value == pytest.approx(1.0, abs=1e-4)


def test_analytic_objective_multi():
    c = np.array([0.2, 0.7, 0.45, 0.9])
    res = optimize(LearnerConfig(restarts=10), lambda a: 1 - np.sum((a - c) ** 2), list("abcd"))
    for w in res.restart_weights:
        assert np.all(np.abs(w - c) <= 0.01)


def test_constant_objective_keeps_initialization():
    res = optimize(LearnerConfig(restarts=2, seed=4), lambda a: 0.3, ["x", "y"])
    assert res.value == 0.3
    for r, w in enumerate(res.restart_weights):
        start = [row[4] for row in res.trace if row[0] == r and row[1] == 0][0]
        np.testing.assert_array_equal(w, start)


def test_projection_keeps_weights_non_negative():
    res = optimize(LearnerConfig(restarts=4), lambda a: -np.sum((a + 1) ** 2), ["x", "y"])
    for row in res.trace:
        assert np.all(row[4] >= 0)
    assert np.all(res.weights == 0)


def test_accepted_values_non_decreasing():
    rng = np.random.default_rng(0)
    peaks = rng.uniform(0, 1, size=(5, 3))

    def bumpy(a):
        return float(np.max(np.exp(-np.sum((peaks - a) ** 2, axis=1) * 20)))

    res = optimize(LearnerConfig(restarts=5), bumpy, ["x", "y", "z"])
    for r in range(5):
        values = [row[2] for row in res.trace if row[0] == r]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert values[-1] >= values[0]


def test_seed_determinism():
    l1, l2 = _periodic_split()
    a = train(l1, l2, ALL_METRICS, FAST)
    b = train(l1, l2, ALL_METRICS, FAST)
    assert repr(a.trace) == repr(b.trace)
    np.testing.assert_array_equal(a.weights, b.weights)
    c = train(l1, l2, ALL_METRICS, LearnerConfig(restarts=3, seed=2))
    assert repr(c.trace) != repr(a.trace)


def test_learner_recovers_periodic_activity():
    l1, l2 = _periodic_split()
    res = train(l1, l2, ALL_METRICS, LearnerConfig(restarts=2, max_iterations=200))
    assert res.value >= 0.99
    assert all(v >= 0.99 for v in res.restart_values)


def test_scoring_passes_counted(monkeypatch):
    calls = []
    real = metrics_mod.score_metric

    def counting(*args, **kwargs):
        calls.append(args[1])
        return real(*args, **kwargs)

    monkeypatch.setattr(metrics_mod, "score_metric", counting)
    _, s = random_stream(5, n_nodes=12, n_links=150)
    l1, l2 = split_periods(s, PeriodSchedule.contiguous(0, 50))
    metrics = ["CN", "SI", "WCN", "PAE", "PAE10L"]
    res = train(l1, l2, metrics, LearnerConfig(restarts=2, max_iterations=30))
    assert res.evaluations > 50
    assert len(calls) == len(metrics)


def test_degenerate_weights_score_zero():
    l1, l2 = _periodic_split()
    problem = ObjectiveProblem(l1, l2, ["PAE", "CN"])
    assert problem([0.0, 0.0]) == 0.0
    assert problem.predict([0.0, 0.0]) is None


def test_objective_problem_matches_full_pipeline():
    from streampredict import (PairMap, allocate, confusion, extrapolate_total,
                               prediction_index, prf, score_all)
    _, s = random_stream(9, n_nodes=10, n_links=120)
    l1, l2 = split_periods(s, PeriodSchedule.contiguous(0, 50))
    metrics = ["CN", "RA", "PAE"]
    weights = {"CN": 0.3, "RA": 0.2, "PAE": 0.9}
    tables = score_all(l1, metrics)
    pred = allocate(extrapolate_total(l1, l2.interval), prediction_index(weights, tables))
    want = prf(confusion(pred, PairMap.from_stream(l2)))[2]
    assert objective(weights, l1, l2, metrics) == pytest.approx(want, abs=1e-12)
