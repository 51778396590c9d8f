"""Shared fixtures: synthetic observation worlds and the independent
brute-force aggregation oracle the pipeline must match exactly."""

from __future__ import annotations

import calendar
import math
from pathlib import Path

import numpy as np
import pytest

from weatherfusion import aggregation as agg
from weatherfusion import store as store_mod
from weatherfusion.store import Store

FIXTURES = Path(__file__).parent / "fixtures"

STATION_IDS = [f"XX0TEST{k:04d}" for k in range(1, 9)]


def make_world(rng: np.random.Generator, n_stations: int, start_year: int, n_months: int):
    """Random raw observations: per station-month a day-coverage level that
    straddles the validity threshold, with 1-3 readings per day and element."""
    rows = []  # (station, yyyymmdd, element, value)
    stations = STATION_IDS[:n_stations]
    for station in stations:
        for k in range(n_months):
            year = start_year + (k // 12)
            month = k % 12 + 1
            dim = calendar.monthrange(year, month)[1]
            threshold = math.ceil(0.7 * dim)
            for element in agg.VARIABLES:
                # Mix of clearly-valid, boundary and clearly-missing months.
                mode = rng.integers(0, 6)
                if mode == 0:
                    observed = 0
                elif mode == 1:
                    observed = int(rng.integers(1, threshold))
                elif mode == 2:
                    observed = threshold - 1
                elif mode == 3:
                    observed = threshold
                else:
                    observed = int(rng.integers(threshold, dim + 1))
                days = rng.permutation(np.arange(1, dim + 1))[:observed]
                for day in sorted(int(d) for d in days):
                    date_s = f"{year:04d}{month:02d}{day:02d}"
                    for _ in range(int(rng.integers(1, 3))):
                        if element == agg.PRCP:
                            value = int(rng.integers(0, 400))
                        else:
                            value = int(rng.integers(-250, 420))
                        rows.append((station, date_s, element, value))
    return rows, stations


def _oracle_index(rows):
    """Group raw rows by (variable, station, month-prefix, day) in one pass."""
    index: dict[tuple[str, str, str], dict[str, int]] = {}
    for station, date_s, element, value in rows:
        by_day = index.setdefault((element, station, date_s[:6]), {})
        if date_s not in by_day:
            by_day[date_s] = value
        elif element == agg.PRCP:
            by_day[date_s] += value
        elif element == agg.TMIN:
            by_day[date_s] = min(by_day[date_s], value)
        else:
            by_day[date_s] = max(by_day[date_s], value)
    return index


def make_full_world(years, stations=("XX0TEST0001", "XX0TEST0002")):
    """Gap-free observations: every station reports all three elements daily."""
    rows = []
    for station in stations:
        for year in years:
            for month in range(1, 13):
                for day in range(1, calendar.monthrange(year, month)[1] + 1):
                    date_s = f"{year:04d}{month:02d}{day:02d}"
                    seasonal = 100.0 * math.sin(2 * math.pi * month / 12.0)
                    rows.append((station, date_s, agg.TMIN, int(seasonal) - 40 + day % 5))
                    rows.append((station, date_s, agg.TMAX, int(seasonal) + 90 + day % 7))
                    rows.append((station, date_s, agg.PRCP, (day * 7) % 40))
    return rows, list(stations)


def oracle_fused(rows, stations, year: int, month: int, variable: str, index=None) -> float | None:
    """Recompute one fused month straight from the raw rows: per-day fold in
    raw units, convert, per-month fold over days, mean over valid stations."""
    dim = calendar.monthrange(year, month)[1]
    threshold = math.ceil(0.7 * dim)
    prefix = f"{year:04d}{month:02d}"
    if index is None:
        index = _oracle_index(rows)
    valid_values = []
    for station in sorted(stations):
        by_day = index.get((variable, station, prefix), {})
        if len(by_day) < threshold or not by_day:
            continue
        converted = [max(v, 0) / 10.0 if variable == agg.PRCP else v / 10.0 for _, v in sorted(by_day.items())]
        if variable == agg.PRCP:
            month_total = 0.0
            for v in converted:
                month_total += v
            valid_values.append(month_total)
        elif variable == agg.TMIN:
            valid_values.append(min(converted))
        else:
            valid_values.append(max(converted))
    if not valid_values:
        return None
    total = 0.0
    for v in valid_values:
        total += v
    return total / len(valid_values)


def rows_to_csv(rows, path: Path) -> Path:
    lines = [f"{s},{d},{e},{v},,,S," for s, d, e, v in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def run_pipeline(tmp_path: Path, rows, stations, start_year: int, n_months: int):
    """Raw rows through the real store pipeline; fused series per variable."""
    store = Store(tmp_path / "data")
    years = sorted({start_year + k // 12 for k in range(n_months)})
    by_year: dict[int, list] = {y: [] for y in years}
    for row in rows:
        by_year[int(row[1][:4])].append(row)
    db = store.create_region("scope", "country", "XX", list(stations), overwrite=True)
    for year in years:
        csv = rows_to_csv(by_year[year], tmp_path / f"{year}.csv")
        store_mod.ingest_year(csv, store.world, year)
        store_mod.load_region_year(db, store.world, year)
    out = {}
    for variable in agg.VARIABLES:
        unit = agg.UNIT_MM if variable == agg.PRCP else agg.UNIT_C
        out[variable] = store_mod.read_monthly_series(db, variable, unit, years[0], years[-1])
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
