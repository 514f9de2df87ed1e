import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from streampredict import (Confusion, EvaluationReport, Interval, LinkStream, NodePair,
                           PairMap, categorize_pairs, confusion, evaluate, macro_f, prf)
from streampredict.evaluation import category_labels, summarize_realizations
from streampredict.stream import NodeIndex

AB, AC, BC, AZ = NodePair("a", "b"), NodePair("a", "c"), NodePair("b", "c"), NodePair("a", "z")


def test_confusion_examples():
    c = confusion({AB: 4, AC: 2, BC: 2}, {AB: 3, AC: 3, BC: 0})
    assert (c.tp, c.fp, c.fn_) == (5, 3, 1)
    same = confusion({AB: 2.5, AC: 1}, {AB: 2.5, AC: 1})
    assert (same.tp, same.fp, same.fn_) == (3.5, 0, 0)
    low = confusion({AB: 3}, {AB: 5})
    assert (low.tp, low.fp, low.fn_) == (3, 0, 2)


def test_confusion_one_sided_pairs():
    c = confusion({AB: 2}, {AC: 3})
    assert (c.tp, c.fp, c.fn_) == (0, 2, 3)


def test_confusion_rejects_negative():
    with pytest.raises(ValueError):
        confusion({AB: -1}, {AB: 1})


def test_prf_examples():
    p, r, f = prf(Confusion(5, 3, 1))
    assert p == pytest.approx(0.625, abs=1e-12)
    assert r == pytest.approx(5 / 6, abs=1e-12)
    assert f == pytest.approx(2 * 0.625 * (5 / 6) / (0.625 + 5 / 6), abs=1e-12)
    assert round(f, 4) == 0.7143
    assert prf(Confusion(0, 0, 0)) == (0, 0, 0)
    assert prf(Confusion(0, 4, 2)) == (0, 0, 0)


def test_macro_f_examples():
    assert macro_f([0.25, 0.41, 0.65]) == pytest.approx(3 / (1 / 0.25 + 1 / 0.41 + 1 / 0.65), abs=1e-12)
    assert round(macro_f([0.25, 0.41, 0.65]), 3) == 0.376
    assert macro_f([0.3, 0.3, 0.3]) == pytest.approx(0.3)
    assert macro_f([0.9, 0.0, 0.5]) == 0
    with pytest.raises(ValueError):
        macro_f([])
    report = EvaluationReport.from_confusion(Confusion(5, 3, 1))
    assert macro_f([report]) == pytest.approx(report.f_score)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.01, 1), min_size=1, max_size=6))
def test_macro_f_bounds(scores):
    m = macro_f(scores)
    assert m <= max(scores) + 1e-12
    assert m <= sum(scores) / len(scores) + 1e-12


def test_categorize_pairs(s1):
    assert categorize_pairs(s1, {AB, AZ}) == {"recurrent": {AB}, "new": {AZ}}
    empty = s1.slice(Interval(50, 60))
    assert categorize_pairs(empty, {AB, AZ}) == {"recurrent": set(), "new": {AB, AZ}}
    assert categorize_pairs(s1, {AB, AC})["new"] == set()


def _random_maps(rng, n_nodes=12):
    nodes = NodeIndex(range(n_nodes))
    pairs = [(i, j) for i in range(n_nodes) for j in range(i + 1, n_nodes)]
    pred = {p: rng.uniform(0, 10) for p in rng.sample(pairs, rng.randint(0, 30))}
    act = {p: float(rng.randint(1, 8)) for p in rng.sample(pairs, rng.randint(0, 30))}
    return nodes, pred, act


def test_identities_on_random_maps():
    rng = random.Random(7)
    for _ in range(1000):
        nodes, pred, act = _random_maps(rng)
        c = confusion(pred, act)
        assert c.tp + c.fp == pytest.approx(sum(pred.values()), rel=1e-9, abs=1e-12)
        assert c.tp + c.fn_ == pytest.approx(sum(act.values()), rel=1e-9, abs=1e-12)
        # PairMap fast path agrees with the mapping path
        fast = confusion(PairMap.from_mapping(pred, nodes), PairMap.from_mapping(act, nodes))
        assert (fast.tp, fast.fp, fast.fn_) == pytest.approx((c.tp, c.fp, c.fn_), abs=1e-9)


def test_decomposability_on_random_partitions():
    rng = random.Random(11)
    for _ in range(300):
        _, pred, act = _random_maps(rng)
        keys = sorted(set(pred) | set(act))
        parts = [[], [], []]
        for k in keys:
            parts[rng.randrange(3)].append(k)
        total = Confusion()
        for part in parts:
            total = total + confusion({k: pred[k] for k in part if k in pred},
                                      {k: act[k] for k in part if k in act})
        whole = confusion(pred, act)
        assert (total.tp, total.fp, total.fn_) == pytest.approx((whole.tp, whole.fp, whole.fn_),
                                                                 abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 20), st.floats(0, 20), st.floats(0, 1))
def test_monotone_in_agreement(p, a, frac):
    closer = p + frac * (a - p)
    before = confusion({AB: p}, {AB: a})
    after = confusion({AB: closer}, {AB: a})
    assert after.tp >= before.tp - 1e-12
    assert after.fp + after.fn_ <= before.fp + before.fn_ + 1e-12


def test_amalgamation_paradox_fixture():
    # two classes; the second prediction improves both class F-scores
    # while the overall F-score drops
    a1, a2, b1, b2 = NodePair(1, 2), NodePair(1, 3), NodePair(2, 3), NodePair(2, 4)
    actual = {a1: 4, b1: 1}
    first = {a1: 1, a2: 0, b1: 0, b2: 0}
    second = {a1: 2, a2: 2, b1: 5, b2: 5}

    def class_f(pred, members):
        return prf(confusion({k: pred[k] for k in members},
                             {k: actual[k] for k in members if k in actual}))[2]

    f_a = [class_f(p, [a1, a2]) for p in (first, second)]
    f_b = [class_f(p, [b1, b2]) for p in (first, second)]
    overall = [prf(confusion(p, actual))[2] for p in (first, second)]
    assert f_a[1] > f_a[0] and f_b[1] > f_b[0]
    assert overall[1] < overall[0]


def test_evaluate_with_breakdowns(s1):
    obs = s1
    target = LinkStream.from_links([(11, "a", "b"), (12, "a", "b"), (13, "b", "c")],
                                   Interval(10, 20), node_universe=s1.nodes.ids)
    pred = PairMap.from_mapping({AB: 1.0, AC: 2.0, BC: 1.0}, obs.nodes)
    report = evaluate(pred, PairMap.from_stream(target), [category_labels(obs)])
    assert report.confusion == Confusion(2.0, 2.0, 1.0)
    assert set(report.breakdowns) == {"recurrent"}
    sub = report.breakdowns["recurrent"].confusion
    assert (sub.tp, sub.fp, sub.fn_) == (2.0, 2.0, 1.0)
    d = report.to_dict()
    assert d["tp"] == 2.0 and "breakdowns" in d


def test_breakdowns_sum_to_overall():
    rng = random.Random(3)
    links = [(rng.uniform(0, 10), *rng.sample(range(8), 2)) for _ in range(30)]
    obs = LinkStream.from_links(links, Interval(0, 10), node_universe=range(10))
    nodes = obs.nodes
    pairs = [(i, j) for i in range(10) for j in range(i + 1, 10)]
    pred = PairMap.from_mapping({p: rng.uniform(0, 3) for p in pairs}, nodes)
    act = PairMap.from_mapping({p: float(rng.randint(0, 3)) for p in rng.sample(pairs, 15)}, nodes)
    report = evaluate(pred, act, [category_labels(obs)])
    parts = list(report.breakdowns.values())
    assert {"new", "recurrent"} == set(report.breakdowns)
    tp = sum(r.confusion.tp for r in parts)
    fp = sum(r.confusion.fp for r in parts)
    fn = sum(r.confusion.fn_ for r in parts)
    assert (tp, fp, fn) == pytest.approx((report.confusion.tp, report.confusion.fp,
                                          report.confusion.fn_), abs=1e-9)


def test_summarize_realizations():
    reports = [EvaluationReport.from_confusion(Confusion(5, 3, 1)),
               EvaluationReport.from_confusion(Confusion(4, 2, 2))]
    out = summarize_realizations(reports)
    assert out["realizations"] == 2
    assert out["mean_f_score"] == pytest.approx(np.mean([r.f_score for r in reports]))
    assert out["f_of_mean_confusion"]["f_score"] == pytest.approx(prf(Confusion(4.5, 2.5, 1.5))[2])
    with pytest.raises(ValueError):
        summarize_realizations([])
