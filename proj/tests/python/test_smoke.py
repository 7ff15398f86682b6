import math

import numpy as np
import pytest

import fairal


def test_train_and_predict():
    X = np.array([[-1.0], [1.0]])
    clf = fairal.train(X, np.array([0.0, 1.0]))
    assert clf.theta[0] > 0
    assert clf.predict(np.array([2.0])) == 1
    zero = fairal.LinearClassifier(np.zeros(2), 0.0)
    assert zero.predict_proba(np.array([3.0, 4.0])) == 0.5


def test_measures():
    assert fairal.measure("mutual_info", 1, 0, 0, 1) == pytest.approx(math.log(2))
    assert fairal.measure("covariance", 2, 3, 4, 6) == 0.0
    assert fairal.contingency([1, 0], [1, 0]) == (1.0, 0.0, 0.0, 1.0)
    assert fairal.entropy([0.75, 0.25]) == pytest.approx(0.5623351446188083)
    with pytest.raises(fairal.UndefinedMeasureError):
        fairal.measure("abs_diff_composition", 3, 0, 2, 0)


def test_schedule():
    s = {"kind": "linear_decay", "hi": 1.0, "lo": 0.0, "steps": 11}
    assert [fairal.alpha_at(s, t, 220) for t in (0, 20, 219)] == [1.0, 0.9, 0.0]


def test_selection_strategies_agree_at_alpha_one():
    X, s, y, _ = fairal.make_compas_like(n=60, seed=1)
    X = (X - X.mean(axis=0)) / X.std(axis=0)
    s, y = np.array(s), np.array(y, dtype=float)
    lab = np.arange(8)
    clf = fairal.train(X[lab], y[lab])
    ids = list(range(8, 60))
    args = (ids, X[8:], list(s[8:]), X[lab], y[lab], clf, X, list(s))
    fal_id, table = fairal.select_fal(*args, alpha=1.0)
    fbc_id, _ = fairal.select_fbc(*args, alpha=1.0)
    assert fal_id == fbc_id == fairal.select_entropy(ids, X[8:], clf)
    assert len(table) == len(ids)
    fal_id, table = fairal.select_fal(*args, alpha=0.0)
    assert fal_id in ids
    assert all(0.0 <= r["fairness_term"] <= 1.0 for r in table)


def test_aggregates():
    agg = fairal.CovAggregates(2)
    agg.add(np.array([2.0, 3.0]), 1)
    assert agg.n == 1 and agg.g_y == 1.0
    agg.add(np.array([0.0, 1.0]), 0)
    hyp = agg.hypothetical_cov(np.array([1.0, 1.0]), 0, 1)
    agg.add(np.array([1.0, 1.0]), 1)
    assert hyp == agg.cov(0)


def test_scenario_acceptance():
    X, s, y, names = fairal.make_synthetic_scenario(seed=3)
    assert names == ["x1", "x2"]
    s, y = np.array(s), np.array(y)
    assert abs(y[s == 0].mean() - 0.5) <= 0.03
    assert abs(y[s == 1].mean() - 0.5) <= 0.03


def test_fixture():
    f = fairal.measure_disagreement_fixture(0.75, 0.01)
    assert f["f1_c"] == pytest.approx(0.0266667, rel=1e-4)


def test_run_experiment():
    config = {
        "dataset": {"kind": "compas_like", "n": 150, "seed": 2},
        "strategy": "fbc",
        "budget": 10,
        "n_splits": 2,
        "record_wall_time": False,
    }
    records, summary = fairal.run_experiment(config)
    assert len(records) == 20
    assert [r["train_size"] for r in records[:3]] == [7, 8, 9]
    assert len(summary["iterations"]) == 10
    assert records == fairal.run_experiment(config)[0]
