import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirlist.discretize import (
    CATEGORICAL,
    DEFAULT_LEVELS,
    NUMERIC,
    BinningSpec,
    InputError,
    RawTable,
    binarize,
    fit_quantile_bins,
    nearest_rank_quantile,
    numeric_indicators,
)


def table(**cols):
    kinds = {k: (NUMERIC if np.asarray(v).dtype.kind in "fi" else CATEGORICAL) for k, v in cols.items()}
    n = len(next(iter(cols.values())))
    arrays = {k: (np.asarray(v, dtype=float) if kinds[k] == NUMERIC else np.asarray(v, dtype=object))
              for k, v in cols.items()}
    return RawTable(arrays, kinds, np.arange(n) % 2)


def sort_and_index(values, q):
    # independent nearest-rank: walk the sorted values until enough are covered
    vals = sorted(values)
    need = q * len(vals)
    for i, v in enumerate(vals, start=1):
        if i >= need - 1e-9:
            return v


def test_default_levels():
    assert DEFAULT_LEVELS == (0.01, 0.05, 0.10, 0.25, 0.75, 0.90, 0.95, 0.99)


def test_nearest_rank_examples():
    col = np.arange(1, 101, dtype=float)
    assert nearest_rank_quantile(col, 0.25) == 25
    for q in DEFAULT_LEVELS + (0.07, 0.33):
        assert nearest_rank_quantile(col, q) == sort_and_index(col, q)
    with pytest.raises(InputError):
        nearest_rank_quantile([], 0.5)


def test_constant_column_is_dropped():
    spec = fit_quantile_bins(table(c=[3.0] * 20, x=list(range(20))))
    assert spec.thresholds["c"] == (3.0,) * 8
    assert not any(f.column == "c" for f in spec.features)


def test_nine_bins_and_names():
    t = table(x=list(range(1, 101)))
    spec = fit_quantile_bins(t)
    assert spec.thresholds["x"] == (1, 5, 10, 25, 75, 90, 95, 99)
    names = spec.feature_names
    # x<1 is constant false on 1..100 and therefore dropped
    assert names == ("x<5", "x<10", "x<25", "25<=x<=75", "x>75", "x>90", "x>95", "x>99")


def test_bin_membership():
    inds = numeric_indicators("x", (1, 5, 10, 25, 75, 90, 95, 99), DEFAULT_LEVELS)
    assert len(inds) == 9
    below = [int(i.apply(np.array([0.5]))[0]) for i in inds]
    assert below == [1, 1, 1, 1, 0, 0, 0, 0, 0]
    middle = [int(i.apply(np.array([50.0]))[0]) for i in inds]
    assert middle == [0, 0, 0, 0, 1, 0, 0, 0, 0]
    # ties at a threshold land in the closed middle band
    at_t4 = [int(i.apply(np.array([25.0]))[0]) for i in inds]
    assert at_t4 == [0, 0, 0, 0, 1, 0, 0, 0, 0]


def test_categorical_indicators_and_unseen_values():
    train = table(colour=["red", "blue", "red", "green"])
    spec = fit_quantile_bins(train)
    assert spec.feature_names == ("colour=blue", "colour=green", "colour=red")
    test = table(colour=["purple", "red"])
    ds = binarize(test, spec)
    assert ds.features.astype(int).tolist() == [[0, 0, 0], [0, 0, 1]]


def test_apply_is_idempotent_and_spec_round_trips():
    rng = np.random.default_rng(0)
    t = table(a=rng.normal(size=300), b=rng.exponential(size=300), c=list("xyz" * 100))
    spec = fit_quantile_bins(t)
    one, two = binarize(t, spec), binarize(t, spec)
    assert (one.features == two.features).all()
    again = BinningSpec.from_json(spec.to_json())
    assert again == spec
    assert (binarize(t, again).features == one.features).all()


def test_missing_column():
    spec = fit_quantile_bins(table(a=list(range(10))))
    with pytest.raises(InputError):
        binarize(table(b=list(range(10))), spec)


def test_bad_levels():
    with pytest.raises(ValueError):
        fit_quantile_bins(table(a=list(range(10))), (0.5, 0.25))
    with pytest.raises(ValueError):
        fit_quantile_bins(table(a=list(range(10))), (0.0, 0.5))


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=300))
def test_quantile_calibration_property(values):
    col = np.asarray(values)
    n = col.size
    for q in DEFAULT_LEVELS:
        t = nearest_rank_quantile(col, q)
        frac = np.mean(col <= t)
        assert frac >= q - 1e-12
        if np.unique(col).size == n:
            assert frac <= q + 1 / n + 1e-12


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=2, max_size=200))
def test_nesting_property(values):
    col = np.asarray(values)
    thresholds = tuple(nearest_rank_quantile(col, q) for q in DEFAULT_LEVELS)
    ind = np.column_stack([i.apply(col) for i in numeric_indicators("x", thresholds, DEFAULT_LEVELS)])
    low, high = ind[:, :4], ind[:, 5:]
    assert (np.diff(low.astype(int), axis=1) >= 0).all()
    assert (np.diff(high.astype(int), axis=1) <= 0).all()
    # every value sits in exactly one of: lowest "<", middle, highest ">" or a between-gap
    assert ((ind[:, 3] & ind[:, 4]) == 0).all() and ((ind[:, 4] & ind[:, 5]) == 0).all()


def test_csv_ingestion(tmp_path):
    path = tmp_path / "raw.csv"
    path.write_text("age,city,outcome\n30,paris,yes\n41,rome,no\n25,paris,yes\n")
    t = RawTable.from_csv(path, "outcome", positive_label="yes")
    assert t.kinds == {"age": NUMERIC, "city": CATEGORICAL}
    assert t.labels.tolist() == [True, False, True]
    forced = RawTable.from_csv(path, "outcome", "yes", kinds={"age": CATEGORICAL})
    assert forced.kinds["age"] == CATEGORICAL


def test_csv_errors(tmp_path):
    path = tmp_path / "raw.csv"
    path.write_text("a,b\n1,0\n2\n3,1,9\n")
    with pytest.raises(InputError, match="3, 4"):
        RawTable.from_csv(path, "b")
    with pytest.raises(InputError, match="label column"):
        RawTable.from_csv(path, "zzz")
    path.write_text("a,b\n1,0\nfoo,1\n")
    with pytest.raises(InputError, match="rows 3"):
        RawTable.from_csv(path, "b", kinds={"a": NUMERIC})
