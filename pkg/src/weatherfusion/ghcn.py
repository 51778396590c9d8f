"""Download, decompress and parse GHCN daily by-year files and station metadata.

By-year files are comma-separated with eight fields per row:
station, date (YYYYMMDD), element, value, M-flag, Q-flag, S-flag, obs time.
The station metadata file is fixed width (id 1-11, latitude 13-20,
longitude 22-30, elevation 32-37, name 42-71, all 1-indexed).
"""

from __future__ import annotations

import gzip
import logging
import os
import shutil
import zlib
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path
from typing import Callable, Iterable, Iterator

import requests

from .errors import (
    CorruptGzipError,
    DiskError,
    MalformedError,
    NetworkError,
    YearRangeError,
)

logger = logging.getLogger(__name__)

BY_YEAR_URL = "https://www1.ncdc.noaa.gov/pub/data/ghcn/daily/by_year/{year}.csv.gz"
FIRST_YEAR = 1763

# Element codes carried by the archive's core set; only the first three feed
# the stores, the rest are parsed and dropped.
TRACKED_ELEMENTS = ("TMIN", "TMAX", "PRCP")
CORE_ELEMENTS = ("TMIN", "TMAX", "TOBS", "PRCP", "SNOW", "SNWD")

ELEVATION_MISSING = -999.9

_DOWNLOAD_CHUNK = 1 << 20


@dataclass
class RawObservation:
    """One parsed by-year row."""

    station_id: str
    date: date
    element: str
    value: int
    m_flag: str | None = None
    q_flag: str | None = None
    s_flag: str | None = None
    obs_time: str | None = None

    def to_csv_line(self) -> str:
        return ",".join(
            [
                self.station_id,
                self.date.strftime("%Y%m%d"),
                self.element,
                str(self.value),
                self.m_flag or "",
                self.q_flag or "",
                self.s_flag or "",
                self.obs_time or "",
            ]
        )


@dataclass
class YearFile:
    year: int
    compressed_path: Path | None
    csv_path: Path | None
    compressed_bytes: int = 0
    csv_bytes: int = 0
    record_count: int = 0


@dataclass
class ParseStats:
    """Counters reported by a streaming parse."""

    total_lines: int = 0
    retained: int = 0
    malformed: int = 0
    quality_flagged: int = 0
    untracked_element: int = 0


def packaged_sample_gz() -> Path:
    """Bundled by-year excerpt (2017) used for offline runs and tests."""
    from importlib import resources

    return Path(str(resources.files("weatherfusion").joinpath("data/ghcn_2017_sample.csv.gz")))


def build_year_url(year: int) -> str:
    """URL of the archive's compressed by-year file."""
    current = datetime.now().year
    if not FIRST_YEAR <= year <= current:
        raise YearRangeError(f"year {year} outside [{FIRST_YEAR}, {current}]")
    return BY_YEAR_URL.format(year=year)


def download_year(
    year: int,
    dest_dir: Path | str,
    progress_sink: Callable[[int], None] | None = None,
) -> YearFile:
    """Fetch the compressed by-year file, reporting integer percent progress.

    Partial files are removed on failure; re-running overwrites the previous
    download.
    """
    url = build_year_url(year)
    dest_dir = Path(dest_dir)
    dest = dest_dir / f"{year}.csv.gz"
    _emit(progress_sink, 0)
    try:
        response = requests.get(url, stream=True, timeout=60)
        response.raise_for_status()
    except requests.RequestException as exc:
        raise NetworkError(f"download failed for {url}: {exc}") from exc
    total = int(response.headers.get("Content-Length") or 0)
    written = 0
    last_pct = 0
    try:
        dest_dir.mkdir(parents=True, exist_ok=True)
        with open(dest, "wb") as out:
            for chunk in response.iter_content(chunk_size=_DOWNLOAD_CHUNK):
                out.write(chunk)
                written += len(chunk)
                if total:
                    pct = min(99, int(written * 100 / total))
                    if pct > last_pct:
                        last_pct = pct
                        _emit(progress_sink, pct)
    except requests.RequestException as exc:
        _remove_quietly(dest)
        raise NetworkError(f"download interrupted for {url}: {exc}") from exc
    except OSError as exc:
        _remove_quietly(dest)
        raise DiskError(f"cannot write {dest}: {exc}") from exc
    _emit(progress_sink, 100)
    logger.info("downloaded %s (%d bytes)", dest, written)
    return YearFile(year=year, compressed_path=dest, csv_path=None, compressed_bytes=written)


def decompress_gz(src: Path | str, dest_dir: Path | str) -> Path:
    """Inflate a .gz file into dest_dir, returning the plain-file path."""
    src = Path(src)
    dest_dir = Path(dest_dir)
    name = src.name[:-3] if src.name.endswith(".gz") else src.name + ".out"
    dest = dest_dir / name
    try:
        dest_dir.mkdir(parents=True, exist_ok=True)
        with gzip.open(src, "rb") as zin, open(dest, "wb") as out:
            shutil.copyfileobj(zin, out, length=_DOWNLOAD_CHUNK)
    except (gzip.BadGzipFile, EOFError, zlib.error) as exc:
        _remove_quietly(dest)
        raise CorruptGzipError(f"{src} is not a valid gzip stream: {exc}") from exc
    except OSError as exc:
        _remove_quietly(dest)
        raise DiskError(f"cannot decompress {src} to {dest}: {exc}") from exc
    return dest


def parse_daily_record(line: str) -> RawObservation:
    """Parse one by-year CSV row into a RawObservation."""
    parts = line.rstrip("\r\n").split(",")
    if len(parts) != 8:
        raise MalformedError(f"expected 8 comma-separated fields, got {len(parts)}")
    station, date_s, element, value_s, m_flag, q_flag, s_flag, obs_time = parts
    if len(station) != 11:
        raise MalformedError(f"station id must be 11 characters: {station!r}")
    # hot path: manual slicing is ~10x faster than strptime over a full year
    if len(date_s) != 8 or not date_s.isdigit():
        raise MalformedError(f"bad date {date_s!r}")
    try:
        when = date(int(date_s[0:4]), int(date_s[4:6]), int(date_s[6:8]))
    except ValueError as exc:
        raise MalformedError(f"bad date {date_s!r}") from exc
    if not element or len(element) > 4:
        raise MalformedError(f"bad element code {element!r}")
    try:
        value = int(value_s)
    except ValueError as exc:
        raise MalformedError(f"non-integer value {value_s!r}") from exc
    if len(m_flag) > 1 or len(q_flag) > 1 or len(s_flag) > 1:
        raise MalformedError("flags must be single characters")
    if obs_time and (len(obs_time) != 4 or not obs_time.isdigit()):
        raise MalformedError(f"bad observation time {obs_time!r}")
    return RawObservation(
        station_id=station,
        date=when,
        element=element,
        value=value,
        m_flag=m_flag or None,
        q_flag=q_flag or None,
        s_flag=s_flag or None,
        obs_time=obs_time or None,
    )


def iter_observations(
    lines: Iterable[str],
    stats: ParseStats | None = None,
    drop_quality_flagged: bool = True,
    elements: tuple[str, ...] = TRACKED_ELEMENTS,
) -> Iterator[RawObservation]:
    """Stream RawObservations from by-year CSV lines with bounded memory.

    Malformed lines are counted and skipped. Rows failing the archive's
    quality control (non-empty Q-flag) are discarded by default, as are
    element codes outside ``elements``; both are counted.
    """
    stats = stats if stats is not None else ParseStats()
    for line in lines:
        if not line.strip():
            continue
        stats.total_lines += 1
        try:
            obs = parse_daily_record(line)
        except MalformedError:
            stats.malformed += 1
            continue
        if obs.element not in elements:
            stats.untracked_element += 1
            continue
        if drop_quality_flagged and obs.q_flag is not None:
            stats.quality_flagged += 1
            continue
        stats.retained += 1
        yield obs


@dataclass
class StationRecord:
    """Core fields parsed from one fixed-width stations line."""

    station_id: str
    latitude: float
    longitude: float
    elevation: float | None
    name: str


def parse_station_line(line: str) -> StationRecord:
    """Parse one ghcnd-stations fixed-width line."""
    if len(line.rstrip("\r\n")) < 37:
        raise MalformedError("stations line shorter than 37 characters")
    station_id = line[0:11].strip()
    if len(station_id) != 11:
        raise MalformedError(f"station id must be 11 characters: {station_id!r}")
    try:
        latitude = float(line[12:20])
        longitude = float(line[21:30])
        elevation: float | None = float(line[31:37])
    except ValueError as exc:
        raise MalformedError(f"bad numeric field in stations line: {line!r}") from exc
    if not -90.0 <= latitude <= 90.0:
        raise MalformedError(f"latitude {latitude} out of range")
    if not -180.0 <= longitude <= 180.0:
        raise MalformedError(f"longitude {longitude} out of range")
    if elevation == ELEVATION_MISSING:
        elevation = None
    name = line[41:71].strip() if len(line) > 41 else ""
    return StationRecord(station_id, latitude, longitude, elevation, name)


def _emit(sink: Callable[[int], None] | None, pct: int) -> None:
    if sink is not None:
        sink(pct)


def _remove_quietly(path: Path) -> None:
    try:
        os.remove(path)
    except OSError:
        pass
