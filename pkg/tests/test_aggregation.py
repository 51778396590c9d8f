import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weatherfusion import aggregation as agg
from weatherfusion.errors import EmptyError, UnitMismatchError

from conftest import make_world, oracle_fused, run_pipeline


def test_daily_aggregate_operators():
    assert agg.daily_aggregate([10, 5], agg.PRCP) == 15
    assert agg.daily_aggregate([50, 45], agg.TMIN) == 45
    assert agg.daily_aggregate([210, 230], agg.TMAX) == 230


def test_daily_aggregate_empty():
    with pytest.raises(EmptyError):
        agg.daily_aggregate([], agg.PRCP)


@given(st.lists(st.integers(-500, 500), min_size=1, max_size=40), st.randoms())
def test_daily_aggregate_permutation_invariant(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    for variable in agg.VARIABLES:
        assert agg.daily_aggregate(values, variable) == agg.daily_aggregate(shuffled, variable)


def test_convert_units():
    assert agg.convert_units(125, agg.TMIN, agg.UNIT_C) == 12.5
    assert agg.convert_units(125, agg.TMIN, agg.UNIT_F) == 54.5
    assert agg.convert_units(407, agg.PRCP, agg.UNIT_MM) == 40.7


def test_convert_units_rejects_fahrenheit_rain():
    with pytest.raises(UnitMismatchError):
        agg.convert_units(100, agg.PRCP, agg.UNIT_F)


@given(st.floats(min_value=-90, max_value=60, allow_nan=False))
def test_unit_round_trip(c):
    back = agg.fahrenheit_to_celsius(agg.celsius_to_fahrenheit(c))
    assert abs(back - c) < 1e-12


def test_monthly_station_value_operators():
    sm = agg.monthly_station_value("S", 2017, 1, agg.TMIN, [3.0, -1.5, 2.0] * 8 + [1.0] * 4)
    assert sm.value == -1.5 and sm.observed_days == 28
    sm = agg.monthly_station_value("S", 2017, 1, agg.PRCP, [1.0] * 25)
    assert sm.value == 25.0


def test_monthly_station_value_below_threshold_is_missing():
    sm = agg.monthly_station_value("S", 2017, 1, agg.PRCP, [5.0] * 5)
    assert sm.value is None and sm.observed_days == 5


def test_monthly_station_value_threshold_boundary():
    # January: ceil(0.7 * 31) = 22 observed days needed.
    assert agg.validity_threshold(2017, 1) == 22
    assert agg.monthly_station_value("S", 2017, 1, agg.TMAX, [1.0] * 21).value is None
    assert agg.monthly_station_value("S", 2017, 1, agg.TMAX, [1.0] * 22).value == 1.0
    # February in a leap year: ceil(0.7 * 29) = 21.
    assert agg.validity_threshold(2016, 2) == 21


def test_monthly_station_value_empty():
    sm = agg.monthly_station_value("S", 2017, 2, agg.TMAX, [])
    assert sm.value is None and sm.observed_days == 0


def _sm(value, month=1):
    return agg.StationMonth("S", 2017, month, agg.PRCP, value, 25)


def test_spatial_fuse_mean_and_missing():
    assert agg.spatial_fuse([_sm(10.0), _sm(20.0)]) == 15.0
    assert agg.spatial_fuse([_sm(None), _sm(None)]) is None
    assert agg.spatial_fuse([_sm(12.0)]) == 12.0


def test_spatial_fuse_skips_invalid():
    assert agg.spatial_fuse([_sm(10.0), _sm(None), _sm(20.0)]) == 15.0


@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=10), st.randoms())
def test_spatial_fuse_permutation_invariant(values, rnd):
    months = [_sm(v) for v in values]
    shuffled = list(months)
    rnd.shuffle(shuffled)
    assert agg.spatial_fuse(months) == pytest.approx(agg.spatial_fuse(shuffled), abs=1e-9)


def test_spatial_fuse_adding_mean_is_neutral():
    months = [_sm(10.0), _sm(20.0)]
    fused = agg.spatial_fuse(months)
    assert agg.spatial_fuse(months + [_sm(fused)]) == pytest.approx(fused, abs=1e-12)


def test_missing_rate():
    assert agg.missing_rate([1.0] * 36) == 0.0
    assert agg.missing_rate([None] * 18 + [1.0] * 18) == 0.5
    with pytest.raises(EmptyError):
        agg.missing_rate([])


def test_monthly_series_month_at():
    s = agg.MonthlySeries(agg.PRCP, agg.UNIT_MM, 2016, 1, [None] * 36)
    assert s.month_at(0) == (2016, 1)
    assert s.month_at(11) == (2016, 12)
    assert s.month_at(12) == (2017, 1)
    assert s.month_at(35) == (2018, 12)


@settings(deadline=None, max_examples=10)
@given(st.integers(0, 10_000))
def test_pipeline_matches_oracle_property(seed):
    rng = np.random.default_rng(seed)
    rows, stations = make_world(rng, n_stations=int(rng.integers(1, 4)), start_year=2016, n_months=12)
    fused = _pipeline_in_memory(rows, stations, 2016, 12)
    for variable in agg.VARIABLES:
        for month in range(1, 13):
            expected = oracle_fused(rows, stations, 2016, month, variable)
            assert fused[variable][month - 1] == expected


def _pipeline_in_memory(rows, stations, year, n_months):
    """ingest -> daily -> monthly -> fuse via the public aggregation surface."""
    out = {v: [] for v in agg.VARIABLES}
    for variable in agg.VARIABLES:
        base_unit = agg.UNIT_MM if variable == agg.PRCP else agg.UNIT_C
        for k in range(n_months):
            month = k % 12 + 1
            station_months = []
            for station in sorted(stations):
                by_day: dict[str, list[int]] = {}
                for s, date_s, element, value in rows:
                    if s == station and element == variable and date_s.startswith(f"{year:04d}{month:02d}"):
                        by_day.setdefault(date_s, []).append(value)
                dailies = []
                for _, values in sorted(by_day.items()):
                    raw = agg.daily_aggregate(values, variable)
                    if variable == agg.PRCP and raw < 0:
                        raw = 0
                    dailies.append(agg.convert_units(raw, variable, base_unit))
                station_months.append(
                    agg.monthly_station_value(station, year, month, variable, dailies)
                )
            out[variable].append(agg.spatial_fuse(station_months))
    return out


def test_store_pipeline_matches_oracle_exactly(tmp_path, rng):
    rows, stations = make_world(rng, n_stations=3, start_year=2016, n_months=24)
    series = run_pipeline(tmp_path, rows, stations, 2016, 24)
    for variable in agg.VARIABLES:
        for k in range(24):
            year, month = 2016 + k // 12, k % 12 + 1
            expected = oracle_fused(rows, stations, year, month, variable)
            got = series[variable].values[k]
            assert got == expected, (variable, year, month)
