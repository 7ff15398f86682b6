"""Fair active learning: selection strategies, disparity measures and an experiment harness."""

import json as _json

from ._core import (
    CovAggregates,
    LinearClassifier,
    UndefinedMeasureError,
    contingency,
    disparity,
    entropy,
    make_compas_like,
    make_synthetic_scenario,
    measure,
    measure_disagreement_fixture,
    select_entropy,
    select_fal,
    select_fbc,
    train,
)
from . import _core

MEASURES = (
    "mutual_info",
    "covariance",
    "abs_diff_acceptance",
    "abs_diff_composition",
    "ratio_acceptance",
    "ratio_composition",
)


def alpha_at(schedule, t, budget):
    """alpha_t for a schedule dict such as {"kind": "linear_decay", "hi": 1, "lo": 0, "steps": 11}."""
    return _core.alpha_at(_json.dumps(schedule), t, budget)


def run_experiment(config, base_dir="", threads=0):
    """Run a config dict; returns (records, summary) as plain Python objects.

    Undefined disparities come back as None.
    """
    records, summary = _core.run_experiment(_json.dumps(config), str(base_dir), threads)
    return _json.loads(records), _json.loads(summary)


__all__ = [
    "CovAggregates",
    "LinearClassifier",
    "MEASURES",
    "UndefinedMeasureError",
    "alpha_at",
    "contingency",
    "disparity",
    "entropy",
    "make_compas_like",
    "make_synthetic_scenario",
    "measure",
    "measure_disagreement_fixture",
    "run_experiment",
    "select_entropy",
    "select_fal",
    "select_fbc",
    "train",
]
