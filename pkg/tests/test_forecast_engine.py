import json
import math
from pathlib import Path

import numpy as np
import pytest

from weatherfusion import aggregation as agg
from weatherfusion.catalog import StationMeta
from weatherfusion.errors import InsufficientDataError, MalformedError
from weatherfusion.forecast import (
    ForecastResult,
    build_lagged_dataset,
    forecast_nba,
    forecast_standard,
    recursive_forecast,
    train,
)
from weatherfusion.views import (
    KIND_NEIGHBOUR,
    KIND_STANDARD,
    ParsedView,
    encode_coordinate,
    render_view,
)

from conftest import FIXTURES

TARGET = StationMeta("JOM00040250", "H-4", "JO", "Jordan", "Middle East", 32.539, 38.195, 686.0)


def standard_view(values_by_var, start_year=2015):
    n = len(values_by_var["rainfall"])
    rows = []
    for i in range(n):
        y, m = start_year + i // 12, i % 12 + 1
        rows.append(
            [(y, m, 1), values_by_var["rainfall"][i], values_by_var["tmin"][i], values_by_var["tmax"][i]]
        )
    return ParsedView(KIND_STANDARD, "weather-project", ["Date", "rainfall", "tmin", "tmax"], rows)


def sinusoid_view(n=36, noise=0.0, seed=0, start_year=2015):
    rng = np.random.default_rng(seed)
    vals = [20.0 + 12.0 * math.sin(2 * math.pi * (m + 1) / 12.0) + rng.normal(0, noise) for m in range(n)]
    return standard_view({"rainfall": vals, "tmin": vals, "tmax": vals}, start_year)


def neighbour_view_file(tmp_path, rows):
    view = ParsedView(
        KIND_NEIGHBOUR,
        "weather-project",
        ["year", "month", "rainfall", "latitude", "longitude", "altitude"],
        rows,
    )
    path = tmp_path / "train.arff"
    path.write_text(render_view(view), encoding="utf-8")
    return path


def test_horizon_contract():
    result = forecast_standard(sinusoid_view(), "univariate", "lr", "tmax")
    assert len(result.values) == 12
    assert result.months[0] == (2018, 1)
    assert result.months[-1] == (2018, 12)
    # contiguity
    for (y1, m1), (y2, m2) in zip(result.months, result.months[1:]):
        assert (y2 * 12 + m2) - (y1 * 12 + m1) == 1


def test_forecast_months_follow_training_range_mid_year():
    view = sinusoid_view(n=30)  # ends June 2017
    result = forecast_standard(view, "univariate", "lr", "tmax")
    assert result.months[0] == (2017, 7)
    assert result.months[-1] == (2018, 6)


def test_determinism_bit_identical():
    view = sinusoid_view(noise=0.5, seed=3)
    for method in ("gp", "lr", "smo", "mlp", "bagging"):
        a = forecast_standard(view, "univariate", method, "tmin", seed=9)
        b = forecast_standard(view, "univariate", method, "tmin", seed=9)
        assert a.values == b.values


def test_constant_series_fixed_point():
    view = standard_view({v: [7.5] * 36 for v in ("rainfall", "tmin", "tmax")})
    for method in ("gp", "lr", "smo", "mlp", "bagging"):
        result = forecast_standard(view, "univariate", method, "tmax")
        assert max(abs(v - 7.5) for v in result.values) < 1e-6


def test_sinusoid_lr_closed_form_continuation():
    # Noiseless seasonal series: LR on seasonal features must continue the
    # analytic sinusoid; the oracle is the generating formula itself.
    view = sinusoid_view(n=60, noise=0.0)
    result = forecast_standard(view, "univariate", "lr", "tmax")
    truth = [20.0 + 12.0 * math.sin(2 * math.pi * (60 + k + 1) / 12.0) for k in range(12)]
    err = sum((a - b) ** 2 for a, b in zip(result.values, truth)) / 12
    denom = (sum(truth) / 12) * (sum(result.values) / 12)
    assert err / denom <= 1e-3


def test_multivariate_rolls_all_variables():
    rng = np.random.default_rng(8)
    base = [20.0 + 12.0 * math.sin(2 * math.pi * (m + 1) / 12.0) for m in range(36)]
    values = {
        "rainfall": [max(0.0, 40 - v + rng.normal(0, 1)) for v in base],
        "tmin": [v - 8 + rng.normal(0, 0.5) for v in base],
        "tmax": [v + rng.normal(0, 0.5) for v in base],
    }
    view = standard_view(values)
    result = forecast_standard(view, "multivariate", "lr", "tmax")
    assert len(result.values) == 12
    assert result.mode == "multivariate"
    # target unit comes from the view
    assert result.unit == agg.UNIT_C


def test_multivariate_on_identical_variables_matches_univariate():
    # duplicated inputs add no information: the minimum-norm fit splits the
    # weights across the copies and the rolled-forward forecast is unchanged
    rng = np.random.default_rng(19)
    vals = [20.0 + 12.0 * math.sin(2 * math.pi * (m + 1) / 12.0) + rng.normal(0, 0.4) for m in range(36)]
    view = standard_view({v: vals.copy() for v in ("rainfall", "tmin", "tmax")})
    uni = forecast_standard(view, "univariate", "lr", "tmax", seed=1)
    multi = forecast_standard(view, "multivariate", "lr", "tmax", seed=1)
    assert multi.values == pytest.approx(uni.values, abs=1e-6)


def test_univariate_ignores_other_variables():
    vals = [20.0 + 12.0 * math.sin(2 * math.pi * (m + 1) / 12.0) for m in range(36)]
    junk = list(np.random.default_rng(0).normal(size=36) * 100)
    a = forecast_standard(standard_view({"rainfall": junk, "tmin": junk, "tmax": vals}), "univariate", "lr", "tmax")
    b = forecast_standard(standard_view({"rainfall": vals, "tmin": vals, "tmax": vals}), "univariate", "lr", "tmax")
    assert a.values == pytest.approx(b.values, abs=1e-9)


def test_recursive_consistency_one_call_vs_iterated():
    view = sinusoid_view(noise=0.3, seed=5)
    from weatherfusion.views import standard_series
    from weatherfusion.forecast import impute_series

    series = impute_series(standard_series(view)[agg.TMAX])
    values = {"TMAX": series.values}
    dataset = build_lagged_dataset(values, "TMAX", start_month=1, lags=12)
    model = train("lr", dataset, seed=1)
    whole = recursive_forecast({"TMAX": model}, values, ["TMAX"], 12, 12, horizon=12)["TMAX"]
    stepped: list[float] = []
    history = {"TMAX": list(series.values)}
    month = 12
    for _ in range(12):
        out = recursive_forecast({"TMAX": model}, history, ["TMAX"], 12, month, horizon=1)["TMAX"]
        stepped.append(out[0])
        history["TMAX"].append(out[0])
        month = month % 12 + 1
    assert whole == stepped


def test_target_scale_equivariance():
    rng = np.random.default_rng(17)
    vals = [20.0 + 12.0 * math.sin(2 * math.pi * (m + 1) / 12.0) + rng.normal(0, 0.5) for m in range(36)]
    a, b = 2.5, 7.0
    scaled = [a * v + b for v in vals]
    base_view = standard_view({v: vals.copy() for v in ("rainfall", "tmin", "tmax")})
    scaled_view = standard_view({v: scaled.copy() for v in ("rainfall", "tmin", "tmax")})
    for method, tol in (("lr", 1e-6), ("gp", 1e-4), ("smo", 1e-4)):
        base = forecast_standard(base_view, "univariate", method, "tmax", seed=2)
        moved = forecast_standard(scaled_view, "univariate", method, "tmax", seed=2)
        expected = [a * v + b for v in base.values]
        scale = max(abs(v) for v in expected)
        worst = max(abs(x - y) for x, y in zip(moved.values, expected))
        assert worst / scale < tol, method


def test_fully_missing_calendar_month_rejected():
    vals: list = [20.0] * 36
    for i in (6, 18, 30):
        vals[i] = None
    view = standard_view({"rainfall": vals, "tmin": vals, "tmax": vals})
    with pytest.raises(InsufficientDataError):
        forecast_standard(view, "univariate", "lr", "tmax")


def test_forecast_standard_rejects_wrong_view(tmp_path):
    rows = [[2016.0, float(m), 1.0, 10.0, 20.0, 30.0] for m in range(1, 13)]
    path = neighbour_view_file(tmp_path, rows)
    with pytest.raises(MalformedError):
        forecast_standard(path, "univariate", "lr", "tmax")


def test_forecast_result_round_trip_json():
    result = forecast_standard(sinusoid_view(), "univariate", "lr", "tmax", seed=4)
    again = ForecastResult.from_dict(json.loads(json.dumps(result.to_dict())))
    assert again.values == result.values
    assert again.months == result.months


# -- neighbour-based analysis -----------------------------------------------


def lapse_rows(seed=0, years=range(2014, 2019), alts=(200.0, 500.0, 800.0, 1100.0), noise=0.0):
    rng = np.random.default_rng(seed)
    rows = []
    for i, alt in enumerate(alts):
        lat, lon = 30.0 + i, 35.0 + i
        for y in years:
            for m in range(1, 13):
                value = 30.0 - 0.006 * alt + 8.0 * math.sin(2 * math.pi * m / 12.0) + rng.normal(0, noise)
                rows.append([float(y), float(m), value, float(encode_coordinate(lat)), float(encode_coordinate(lon)), alt])
    return rows


def test_nba_identical_profile_is_month_lookup(tmp_path):
    f = {m: 10.0 + 3.0 * (m % 4) for m in range(1, 13)}
    rows = []
    for i in range(4):
        for y in (2015, 2016, 2017):
            for m in range(1, 13):
                rows.append([float(y), float(m), f[m], 100000.0 + i, 200000.0 + i, 300.0 + i])
    path = neighbour_view_file(tmp_path, rows)
    result = forecast_nba(path, TARGET, seed=3)
    assert result.months == [(2018, m) for m in range(1, 13)]
    assert result.values == [f[m] for m in range(1, 13)]


def test_nba_single_neighbour_single_year(tmp_path):
    # With 12 rows, bootstrap resampling keeps the echo approximate: every
    # prediction stays in the neighbour's observed range and the monthly
    # pattern is preserved, but slots whose month a resample missed borrow
    # from adjacent months.
    f = {m: float(m) for m in range(1, 13)}
    rows = [[2017.0, float(m), f[m], 100000.0, 200000.0, 300.0] for m in range(1, 13)]
    path = neighbour_view_file(tmp_path, rows)
    result = forecast_nba(path, TARGET, seed=1)
    assert all(1.0 <= v <= 12.0 for v in result.values)
    expected = [f[m] for m in range(1, 13)]
    corr = np.corrcoef(result.values, expected)[0, 1]
    assert corr > 0.95
    assert all(v1 <= v2 for v1, v2 in zip(result.values, result.values[1:]))


def test_nba_lapse_field_held_out_altitude(tmp_path):
    path = neighbour_view_file(tmp_path, lapse_rows())
    target = StationMeta("JOM00040310", "T", "JO", "Jordan", "Middle East", 31.5, 36.5, 650.0)
    result = forecast_nba(path, target, seed=7)
    truth = [30.0 - 0.006 * 650.0 + 8.0 * math.sin(2 * math.pi * m / 12.0) for m in range(1, 13)]
    num = sum((a - b) ** 2 for a, b in zip(truth, result.values)) / 12
    den = (sum(truth) / 12) * (sum(result.values) / 12)
    assert num / den <= 0.05


def test_nba_writes_and_keeps_test_view(tmp_path):
    path = neighbour_view_file(tmp_path, lapse_rows())
    result = forecast_nba(path, TARGET, seed=1)
    assert result.test_view is not None
    test_path = Path(result.test_view)
    assert test_path.exists()
    text = test_path.read_text(encoding="utf-8")
    assert "2019,1,?,325390,381950,686" in text.splitlines()


def test_nba_can_drop_test_view(tmp_path):
    path = neighbour_view_file(tmp_path, lapse_rows())
    result = forecast_nba(path, TARGET, seed=1, keep_test_view=False)
    assert result.test_view is None
    assert not (tmp_path / "train_test.arff").exists()


def test_nba_drops_missing_rows_and_needs_ten(tmp_path):
    rows = [[2017.0, float(m), None, 100000.0, 200000.0, 300.0] for m in range(1, 13)]
    rows[0][2] = 5.0  # only one usable row
    path = neighbour_view_file(tmp_path, rows)
    with pytest.raises(InsufficientDataError):
        forecast_nba(path, TARGET, seed=1)


def test_nba_deterministic_given_seed(tmp_path):
    path = neighbour_view_file(tmp_path, lapse_rows(noise=0.5))
    a = forecast_nba(path, TARGET, seed=5)
    b = forecast_nba(path, TARGET, seed=5)
    c = forecast_nba(path, TARGET, seed=6)
    assert a.values == b.values
    assert a.values != c.values


def test_nba_on_excerpt_fixture():
    # 25-row excerpt leaves 10 usable rows, exactly the minimum
    result = forecast_nba(
        FIXTURES / "neighbour_view_excerpt.arff",
        TARGET,
        seed=1,
        test_view_path=Path(FIXTURES).parent / "tmp_test_view.arff",
        keep_test_view=False,
    )
    assert len(result.values) == 12
    assert result.months[0][0] == 2018
