#!/usr/bin/env python3
"""Regenerate the bundled offline sample: a ~100k-line by-year CSV excerpt
(2017) plus the matching fixed-width stations file.

The sample is synthetic but format-faithful: seasonal temperatures driven by
latitude, semi-arid precipitation for the Jordan stations, sprinkled quality
flags, untracked element codes, and per-station observation gaps. Output is
deterministic (fixed seed, fixed gzip mtime).
"""

from __future__ import annotations

import gzip
import math
from datetime import date, timedelta
from pathlib import Path

import numpy as np

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "weatherfusion" / "data"
YEAR = 2017
SEED = 20170101

# Jordan stations: coordinates consistent with the geographic-view encoding
# used elsewhere in the project (degrees x 10^4).
JORDAN = [
    ("JOM00040250", 32.5390, 38.1950, 686.0, "H-4 AIR BASE"),
    ("JOM00040255", 32.1610, 37.1490, 677.0, "H-5 SAFAWI"),
    ("JOM00040265", 32.3560, 36.2590, 683.0, "KING HUSSEIN AIR COLLEGE"),
    ("JOM00040270", 31.9720, 35.9930, 767.0, "AMMAN MARKA INTL AP"),
    ("JOM00040310", 30.1670, 35.7830, 1069.0, "MA'AN / SHAMS MA'AN"),
]

# (country prefix, count, lat range, lon range, elevation range)
WORLD = [
    ("US", 18, (25.0, 48.0), (-124.0, -71.0), (2.0, 1900.0)),
    ("CA", 8, (43.0, 62.0), (-130.0, -60.0), (5.0, 1100.0)),
    ("MX", 3, (17.0, 31.0), (-115.0, -92.0), (5.0, 2300.0)),
    ("BR", 4, (-30.0, -2.0), (-60.0, -35.0), (3.0, 900.0)),
    ("AR", 3, (-45.0, -25.0), (-70.0, -58.0), (10.0, 900.0)),
    ("SP", 6, (36.5, 43.0), (-8.0, 2.5), (5.0, 1100.0)),
    ("FR", 4, (43.5, 50.5), (-1.5, 7.0), (10.0, 800.0)),
    ("GM", 4, (47.8, 54.0), (7.0, 13.5), (5.0, 700.0)),
    ("UK", 4, (50.5, 57.5), (-5.0, 1.0), (5.0, 300.0)),
    ("IT", 3, (38.0, 45.5), (8.0, 17.0), (5.0, 600.0)),
    ("SW", 2, (56.0, 66.0), (12.0, 20.0), (5.0, 400.0)),
    ("RS", 5, (44.0, 62.0), (33.0, 120.0), (20.0, 500.0)),
    ("CH", 5, (23.0, 45.0), (87.0, 122.0), (5.0, 1500.0)),
    ("JA", 4, (31.5, 43.0), (130.0, 143.0), (2.0, 400.0)),
    ("IN", 4, (10.0, 30.0), (72.0, 88.0), (5.0, 500.0)),
    ("AS", 6, (-38.0, -15.0), (115.0, 152.0), (3.0, 600.0)),
    ("SF", 3, (-34.0, -24.0), (18.0, 31.0), (10.0, 1700.0)),
    ("EG", 2, (24.0, 31.0), (25.0, 34.0), (5.0, 300.0)),
    ("IS", 2, (29.8, 33.0), (34.4, 35.5), (2.0, 800.0)),
    ("SA", 3, (17.0, 30.0), (37.0, 50.0), (5.0, 1200.0)),
    ("TU", 3, (36.5, 41.5), (27.0, 43.0), (5.0, 1700.0)),
]


def month_temp_c(lat: float, month: int, base_shift: float) -> float:
    """Rough monthly mean temperature from latitude and season."""
    phase = (month - 7) / 12.0 if lat >= 0 else (month - 1) / 12.0
    seasonal = math.cos(2.0 * math.pi * phase)
    amplitude = 2.0 + abs(lat) * 0.28
    base = 29.0 - abs(lat) * 0.42 + base_shift
    return base + amplitude * seasonal


def iter_days(year: int):
    d = date(year, 1, 1)
    one = timedelta(days=1)
    while d.year == year:
        yield d
        d += one


def build_stations(rng: np.random.Generator):
    stations = list(JORDAN)
    for prefix, count, lat_r, lon_r, elev_r in WORLD:
        for k in range(count):
            num = int(rng.integers(10_000_000, 99_999_999))
            sid = f"{prefix}M{num:08d}"
            lat = round(float(rng.uniform(*lat_r)), 4)
            lon = round(float(rng.uniform(*lon_r)), 4)
            elev = round(float(rng.uniform(*elev_r)), 1)
            stations.append((sid, lat, lon, elev, f"{prefix} SITE {k + 1:02d}"))
    return stations


def station_lines(stations) -> list[str]:
    lines = []
    for sid, lat, lon, elev, name in stations:
        lines.append(f"{sid:<11} {lat:>8.4f} {lon:>9.4f} {elev:>6.1f}    {name:<30}")
    return lines


def observation_rows(stations, rng: np.random.Generator) -> list[str]:
    rows = []
    for sid, lat, lon, elev, _name in stations:
        shift = float(rng.normal(0.0, 1.5)) - elev * 0.0045
        diurnal = float(rng.uniform(7.0, 13.0))
        wet_base = 0.08 if sid.startswith("JO") else float(rng.uniform(0.15, 0.45))
        obs_time = rng.choice(["", "0700", "0800", "1800"])
        # Shams Ma'an mirrors the high-missing-rainfall scenario.
        sparse_prcp = sid == "JOM00040310"
        day_drop = float(rng.uniform(0.0, 0.04))
        for d in iter_days(YEAR):
            if rng.random() < day_drop:
                continue
            month = d.month
            t_mean = month_temp_c(lat, month, shift)
            tmax = t_mean + diurnal / 2.0 + float(rng.normal(0.0, 1.4))
            tmin = t_mean - diurnal / 2.0 + float(rng.normal(0.0, 1.4))
            date_s = d.strftime("%Y%m%d")
            q_t = "G" if rng.random() < 0.002 else ""
            rows.append(f"{sid},{date_s},TMAX,{round(tmax * 10)},,{q_t},S,{obs_time}")
            rows.append(f"{sid},{date_s},TMIN,{round(tmin * 10)},,,S,{obs_time}")
            if sparse_prcp and not (month == 1 and d.day <= 26):
                pass  # almost all precipitation days unreported
            else:
                wet_p = wet_base * (1.6 if month in (11, 12, 1, 2, 3) else 0.5)
                if sid.startswith("JO") and month in (6, 7, 8, 9):
                    wet_p = 0.0
                wet = rng.random() < wet_p
                amount = round(float(rng.exponential(45.0)) + 10.0) if wet else 0
                q_p = "X" if rng.random() < 0.001 else ""
                rows.append(f"{sid},{date_s},PRCP,{amount},,{q_p},S,{obs_time}")
            if rng.random() < 0.10:
                tobs = t_mean + float(rng.normal(0.0, 2.0))
                rows.append(f"{sid},{date_s},TOBS,{round(tobs * 10)},,,S,{obs_time}")
            if tmin < -1.0 and rng.random() < 0.3:
                rows.append(f"{sid},{date_s},SNWD,{int(rng.integers(0, 250))},,,S,")
    rows.sort(key=lambda r: (r.split(",", 3)[0], r.split(",", 3)[1], r.split(",", 3)[2]))
    return rows


def main() -> None:
    rng = np.random.default_rng(SEED)
    stations = build_stations(rng)
    DATA_DIR.mkdir(parents=True, exist_ok=True)

    stations_path = DATA_DIR / "ghcnd_stations_sample.txt"
    stations_path.write_text("\n".join(station_lines(stations)) + "\n", encoding="utf-8")

    rows = observation_rows(stations, rng)
    payload = ("\n".join(rows) + "\n").encode("utf-8")
    csv_gz = DATA_DIR / f"ghcn_{YEAR}_sample.csv.gz"
    with open(csv_gz, "wb") as fh:
        with gzip.GzipFile(fileobj=fh, mode="wb", mtime=0) as gz:
            gz.write(payload)
    print(f"{stations_path}: {len(stations)} stations")
    print(f"{csv_gz}: {len(rows)} rows, {csv_gz.stat().st_size} bytes gz")


if __name__ == "__main__":
    main()
