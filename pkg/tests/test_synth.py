import math

import numpy as np
import pytest

from dirlist.core import Direction, assign, check_direction
from dirlist.synth import (
    DIRECTIONAL,
    GENERAL,
    SimConfig,
    gen_ground_truth,
    run_one,
    run_simulation,
    sample_dataset,
    summarize,
)


def test_directional_probabilities_sorted():
    for seed in range(20):
        spec = gen_ground_truth(seed, 10, 1000, DIRECTIONAL)
        p = spec.dlist.probabilities
        assert (np.diff(p) <= 0).all()
        assert spec.dlist.direction is Direction.POSITIVE


def test_ground_truth_shape():
    spec = gen_ground_truth(3, 10, 1000, GENERAL)
    feats = [c.literals for c in spec.dlist.conditions]
    assert all(len(f) == 1 for f in feats)
    assert len(set(feats)) == 10
    assert spec.d == 1000 and spec.K == 10


def test_general_sorted_equals_directional():
    for seed in range(10):
        g = gen_ground_truth([seed, 1, 0], 6, 50, GENERAL)
        d = gen_ground_truth([seed, 1, 0], 6, 50, DIRECTIONAL)
        assert g.dlist.conditions == d.dlist.conditions
        assert sorted(g.dlist.probabilities, reverse=True) == d.dlist.probabilities.tolist()


def test_seed_determinism():
    a = gen_ground_truth(42, 5, 30, GENERAL)
    b = gen_ground_truth(42, 5, 30, GENERAL)
    assert a.dlist == b.dlist
    x = sample_dataset(a, 50, 7)
    y = sample_dataset(a, 50, 7)
    assert (x.features == y.features).all() and (x.labels == y.labels).all()


def test_k_larger_than_d():
    with pytest.raises(ValueError):
        gen_ground_truth(0, 5, 4)


def test_sample_all_ones():
    spec = gen_ground_truth(0, 3, 10, GENERAL)
    from dataclasses import replace
    from dirlist.core import DecisionList, Rule
    ones = DecisionList(tuple(Rule(r.condition, 1.0) for r in spec.dlist.rules), 1.0)
    ds = sample_dataset(replace(spec, dlist=ones), 200, 1)
    assert ds.labels.all()


def test_default_region_share():
    # with q = 0.5 and single-literal rules the default keeps about 2^-K of rows
    K, n = 4, 40_000
    spec = gen_ground_truth(5, K, 20, GENERAL)
    ds = sample_dataset(spec, n, 9)
    share = np.mean(assign(spec.dlist, ds) == K + 1)
    expected = 0.5 ** K
    se = math.sqrt(expected * (1 - expected) / n)
    assert abs(share - expected) < 3 * se


def test_directional_truth_passes_check_on_large_sample():
    for seed in range(5):
        spec = gen_ground_truth(seed, 10, 200, DIRECTIONAL)
        ds = sample_dataset(spec, 10_000, seed + 100)
        # the last rules cover a handful of rows; their raw rates are noisy,
        # so only the well-populated head of the list is checked
        head = spec.dlist.prefix(5)
        assert check_direction(head, ds, Direction.POSITIVE)


def test_identity_learner_gives_ratio_one():
    config = SimConfig(runs=3, n_train=50, n_test=200, K=3, d=20)
    results = run_simulation(config, learner=lambda train, spec: spec.dlist)
    assert [r.ratio for r in results] == [1.0, 1.0, 1.0]


def test_failed_runs_are_flagged():
    def boom(train, spec):
        raise RuntimeError("no")

    results = run_simulation(SimConfig(runs=2, n_train=10, n_test=10, K=2, d=5), learner=boom)
    assert all(math.isnan(r.ratio) and "RuntimeError" in r.error for r in results)


def test_parallel_runs_match_sequential():
    config = SimConfig(runs=4, n_train=200, n_test=500, K=4, d=40, family=GENERAL, seed=3)
    assert run_simulation(config, workers=1) == run_simulation(config, workers=3)


def test_run_one_golden():
    r = run_one(SimConfig(runs=1, n_train=300, n_test=1000, K=5, d=50, seed=123), 0)
    assert (r.run, r.family, r.n_train) == (0, DIRECTIONAL, 300)
    assert r.ratio == pytest.approx(r.ll_gt / r.ll_learned)
    again = run_one(SimConfig(runs=1, n_train=300, n_test=1000, K=5, d=50, seed=123), 0)
    assert again == r


def test_summarize():
    s = summarize([1.0, 2.0, 3.0, float("nan")])
    assert s["count"] == 3 and s["median"] == 2.0
    assert math.isnan(summarize([])["median"])


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(runs=0)
    with pytest.raises(ValueError):
        SimConfig(family="odd")
