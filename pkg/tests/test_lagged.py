import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from weatherfusion import aggregation as agg
from weatherfusion.errors import InsufficientDataError
from weatherfusion.forecast import build_lagged_dataset, impute_series, raw_feature_row


def series(values, variable=agg.PRCP, start_year=2016, start_month=1):
    return agg.MonthlySeries(variable, agg.UNIT_MM, start_year, start_month, list(values))


def test_impute_uses_calendar_month_mean():
    values = [None] * 36
    values[0], values[12], values[24] = 10.0, None, 14.0
    for i in range(36):
        if i % 12 != 0:
            values[i] = float(i)
    out = impute_series(series(values))
    assert out.values[12] == 12.0
    assert out.values[0] == 10.0 and out.values[24] == 14.0


def test_impute_identity_when_complete():
    values = [float(i) for i in range(24)]
    assert impute_series(series(values)).values == values


def test_impute_rejects_fully_missing_calendar_month():
    values = [float(i) for i in range(36)]
    for i in (6, 18, 30):  # every July
        values[i] = None
    with pytest.raises(InsufficientDataError):
        impute_series(series(values))


def test_impute_respects_start_month():
    # series starting in March: months are 3..8, so the missing April has no
    # other April to borrow from
    s = series([1.0, None, 1.0, None, 4.0, None], start_month=3)
    with pytest.raises(InsufficientDataError):
        impute_series(s)


@given(st.integers(0, 10_000))
def test_impute_property_fills_all_and_keeps_observed(seed):
    rng = np.random.default_rng(seed)
    n_years = int(rng.integers(2, 5))
    values: list[float | None] = [float(v) for v in rng.uniform(0, 30, size=12 * n_years)]
    # drop random months but keep one value per calendar month
    keep = {m: int(rng.integers(0, n_years)) * 12 + m for m in range(12)}
    for i in range(len(values)):
        if rng.random() < 0.5 and i != keep[i % 12]:
            values[i] = None
    original = list(values)
    out = impute_series(series(values))
    assert all(v is not None for v in out.values)
    for i, v in enumerate(original):
        if v is not None:
            assert out.values[i] == v


def test_lagged_shape_univariate():
    values = {"x": [float(i % 12) + 0.1 * i for i in range(36)]}
    ds = build_lagged_dataset(values, "x", lags=12)
    assert ds.n_rows == 24
    assert len(ds.column_names) == 14
    assert ds.features.shape[1] <= 14


def test_lagged_shape_multivariate():
    rng = np.random.default_rng(0)
    values = {v: list(rng.normal(size=36)) for v in ("a", "b", "c")}
    ds = build_lagged_dataset(values, "b", lags=12, variables=["a", "b", "c"])
    assert ds.n_rows == 24
    assert len(ds.column_names) == 38


def test_lagged_rejects_short_series():
    with pytest.raises(InsufficientDataError):
        build_lagged_dataset({"x": [1.0] * 12}, "x", lags=12)


def test_constant_series_drops_lag_columns_keeps_seasonal():
    ds = build_lagged_dataset({"x": [5.0] * 36}, "x", lags=12)
    kept_names = [n for n, k in zip(ds.column_names, ds.kept) if k]
    assert kept_names == ["season_sin", "season_cos"]
    assert ds.target_std == 1.0  # zero-variance target falls back to unit scale


def test_standardization_round_trip():
    rng = np.random.default_rng(3)
    values = {"x": list(20 + 5 * rng.normal(size=40))}
    ds = build_lagged_dataset(values, "x", lags=6)
    assert np.allclose(ds.features.mean(axis=0), 0, atol=1e-12)
    assert np.allclose(ds.features.std(axis=0), 1, atol=1e-12)
    assert abs(ds.targets.mean()) < 1e-12


def test_feature_row_matches_training_matrix():
    values = {"x": [float(i) + math.sin(i) for i in range(30)]}
    ds = build_lagged_dataset(values, "x", lags=12, start_month=1)
    # Row for t = 12 (first training row, predicting calendar month 1 of year+1)
    month = (1 - 1 + 12) % 12 + 1
    raw = raw_feature_row({"x": values["x"][:12]}, ["x"], 12, month)
    z = ds.standardize_rows(raw.reshape(1, -1))
    assert np.allclose(z[0], ds.features[0], atol=1e-12)


def test_seasonal_features_reflect_target_month():
    values = {"x": [float(i % 7) for i in range(26)]}
    ds = build_lagged_dataset(values, "x", lags=12, start_month=1)
    sin_idx = ds.column_names.index("season_sin")
    # first row predicts index 12, calendar month 1 -> sin(2*pi/12)
    expected = math.sin(2 * math.pi * 1 / 12)
    raw_sin = ds.feature_mean[sin_idx] + ds.feature_std[sin_idx] * ds.features[0][
        [n for n, k in zip(ds.column_names, ds.kept) if k].index("season_sin")
    ]
    assert raw_sin == pytest.approx(expected, abs=1e-9)
