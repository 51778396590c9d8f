"""Embedded document store: a world database of raw observations plus
derived per-scope databases holding daily aggregates and monthly fused
collections (total_p / total_tmax / total_tmin).

One directory per database, one newline-delimited JSON file per collection,
a sidecar index with document counts and sparse byte-offset checkpoints.
Collection replacement is write-new-then-rename so readers never observe a
partial write. The on-disk layout is documented in store-format.md.
"""

from __future__ import annotations

import json
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Iterable, Iterator

from . import aggregation as agg
from .errors import (
    BusyError,
    ExistsError,
    MissingYearError,
    UnitMismatchError,
    UnknownScopeError,
)
from .ghcn import ParseStats, RawObservation, iter_observations

INDEX_FILE = "_index.json"
META_FILE = "meta.json"
LOCK_FILE = ".lock"
MISSING = "?"

# shared encoder: building one per document is measurable at 35M docs/year
_encode_doc = json.JSONEncoder(ensure_ascii=False, separators=(",", ":")).encode

# Index checkpoint spacing (records between stored byte offsets).
CHECKPOINT_EVERY = 10_000

TOTALS = {agg.PRCP: "total_p", agg.TMAX: "total_tmax", agg.TMIN: "total_tmin"}


def daily_collection(year: int, variable: str) -> str:
    """Daily aggregate collection name: bare year for PRCP, year + suffix for temps."""
    return str(year) if variable == agg.PRCP else f"{year}{variable}"


class Database:
    """A directory of append-log NDJSON collections."""

    def __init__(self, root: Path | str, create: bool = False):
        self.root = Path(root)
        if create:
            self.root.mkdir(parents=True, exist_ok=True)
        elif not self.root.is_dir():
            raise UnknownScopeError(f"no database at {self.root}")

    @property
    def name(self) -> str:
        return self.root.name

    def _coll_path(self, name: str) -> Path:
        return self.root / f"{name}.ndjson"

    def list_collections(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.ndjson"))

    def has_collection(self, name: str) -> bool:
        return self._coll_path(name).exists()

    def count(self, name: str) -> int:
        index = self._load_index()
        entry = index.get(name)
        if entry is not None:
            return entry["count"]
        return sum(1 for _ in self.iter_docs(name))

    def iter_docs(self, name: str) -> Iterator[dict]:
        path = self._coll_path(name)
        if not path.exists():
            raise UnknownScopeError(f"no collection {name!r} in {self.name}")
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    yield json.loads(line)

    def replace_collection(self, name: str, docs: Iterable[dict]) -> int:
        """Atomically replace a collection's contents; returns the doc count."""
        with self.write_lock():
            return self._replace_locked(name, docs)

    def _replace_locked(self, name: str, docs: Iterable[dict]) -> int:
        path = self._coll_path(name)
        tmp = path.with_suffix(".ndjson.tmp")
        count = 0
        offset = 0
        checkpoints: list[list[int]] = []
        with open(tmp, "wb") as fh:
            for doc in docs:
                data = (_encode_doc(doc) + "\n").encode("utf-8")
                if count % CHECKPOINT_EVERY == 0:
                    checkpoints.append([count, offset])
                fh.write(data)
                offset += len(data)
                count += 1
        os.replace(tmp, path)
        self._update_index(name, count, checkpoints)
        return count

    @contextmanager
    def write_lock(self):
        """Exclusive writer lock for this database (single writer at a time)."""
        lock = self.root / LOCK_FILE
        try:
            fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            if not _steal_stale_lock(lock):
                raise BusyError(f"database {self.name} is locked by another writer") from None
            fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        try:
            os.write(fd, str(os.getpid()).encode())
            os.close(fd)
            yield
        finally:
            try:
                os.remove(lock)
            except OSError:
                pass

    def _load_index(self) -> dict:
        path = self.root / INDEX_FILE
        if not path.exists():
            return {}
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            return {}

    def _update_index(self, name: str, count: int, checkpoints: list[list[int]]) -> None:
        index = self._load_index()
        index[name] = {"count": count, "checkpoints": checkpoints}
        tmp = self.root / (INDEX_FILE + ".tmp")
        tmp.write_text(json.dumps(index, indent=1), encoding="utf-8")
        os.replace(tmp, self.root / INDEX_FILE)

    def read_meta(self) -> dict:
        path = self.root / META_FILE
        if not path.exists():
            return {}
        return json.loads(path.read_text(encoding="utf-8"))

    def write_meta(self, meta: dict) -> None:
        tmp = self.root / (META_FILE + ".tmp")
        tmp.write_text(json.dumps(meta, indent=1), encoding="utf-8")
        os.replace(tmp, self.root / META_FILE)


def _steal_stale_lock(lock: Path) -> bool:
    """Remove a lock left by a dead process; True when it was reclaimed."""
    try:
        pid = int(lock.read_text().strip() or "0")
    except (OSError, ValueError):
        return False
    if pid > 0:
        try:
            os.kill(pid, 0)
            return False  # owner is alive
        except ProcessLookupError:
            pass
        except PermissionError:
            return False
    try:
        os.remove(lock)
        return True
    except OSError:
        return False


class Store:
    """Root handle binding the world database and the per-scope databases."""

    def __init__(self, data_dir: Path | str):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        (self.data_dir / "databases").mkdir(exist_ok=True)

    @property
    def world(self) -> Database:
        return Database(self.data_dir / "world", create=True)

    def region(self, name: str) -> Database:
        path = self.data_dir / "databases" / name
        if not path.is_dir():
            raise UnknownScopeError(f"unknown database {name!r}")
        return Database(path)

    def list_regions(self) -> list[dict]:
        out = []
        base = self.data_dir / "databases"
        for path in sorted(base.iterdir()):
            if path.is_dir():
                meta = Database(path).read_meta()
                meta.setdefault("name", path.name)
                out.append(meta)
        return out

    def create_region(
        self,
        name: str,
        scope_kind: str,
        scope_id: str,
        station_ids: list[str],
        overwrite: bool = False,
    ) -> Database:
        """Create a scope database with the three empty monthly collections."""
        path = self.data_dir / "databases" / name
        if path.exists():
            if not overwrite:
                raise ExistsError(f"database {name!r} already exists")
            for coll in Database(path).list_collections():
                os.remove(path / f"{coll}.ndjson")
            for extra in (INDEX_FILE, META_FILE):
                if (path / extra).exists():
                    os.remove(path / extra)
        db = Database(path, create=True)
        db.write_meta(
            {
                "name": name,
                "scope_kind": scope_kind,
                "scope_id": scope_id,
                "stations": sorted(station_ids),
            }
        )
        for coll in TOTALS.values():
            db.replace_collection(coll, [])
        return db


def ingest_year(
    csv_path: Path | str,
    world: Database,
    year: int,
    progress: Callable[[int], None] | None = None,
    drop_quality_flagged: bool = True,
) -> dict:
    """Load one by-year CSV into the world database, one doc per retained row.

    Streams with bounded memory; re-ingesting a year replaces its collection
    atomically. Returns the parse counters plus the stored doc count.
    """
    csv_path = Path(csv_path)
    total_bytes = csv_path.stat().st_size or 1
    stats = ParseStats()
    other_year = 0
    read = 0

    def counted(fh) -> Iterator[str]:
        # by-year data is ASCII, so character count serves the progress ratio
        nonlocal read
        for line in fh:
            read += len(line)
            yield line

    def docs() -> Iterator[dict]:
        nonlocal other_year
        last_pct = 0
        with open(csv_path, encoding="utf-8", newline="") as fh:
            observations = iter_observations(
                counted(fh), stats, drop_quality_flagged=drop_quality_flagged
            )
            for obs in observations:
                if obs.date.year != year:
                    other_year += 1
                    continue
                yield _world_doc(obs)
                if progress is not None:
                    pct = min(99, int(read * 100 / total_bytes))
                    if pct > last_pct:
                        last_pct = pct
                        progress(pct)

    if progress is not None:
        progress(0)
    count = world.replace_collection(str(year), docs())
    if progress is not None:
        progress(100)
    return {
        "year": year,
        "documents": count,
        "total_lines": stats.total_lines,
        "malformed": stats.malformed,
        "quality_flagged": stats.quality_flagged,
        "untracked_element": stats.untracked_element,
        "other_year": other_year,
    }


def _world_doc(obs: RawObservation) -> dict:
    return {
        "station_id": obs.station_id,
        "date": obs.date.strftime("%Y%m%d"),
        "element": obs.element,
        "value": obs.value,
        "obs_time": obs.obs_time,
    }


def iso_midnight(year: int, month: int, day: int) -> str:
    return f"{year:04d}-{month:02d}-{day:02d}T00:00:00.000Z"


def load_region_year(
    region: Database,
    world: Database,
    year: int,
    progress: Callable[[int], None] | None = None,
    validity_fraction: float = agg.DEFAULT_VALIDITY_FRACTION,
) -> dict:
    """Aggregate one world year into a scope database.

    Writes the three daily collections (replace) and appends twelve fused
    monthly documents per total_* collection, de-duplicated on (year, month)
    so re-loading a year is idempotent.
    """
    if not world.has_collection(str(year)):
        raise MissingYearError(f"year {year} not loaded in the world database")
    meta = region.read_meta()
    stations = set(meta.get("stations", []))

    if progress is not None:
        progress(0)

    # Fold raw rows into per-(element, station, day) daily aggregates, kept
    # as raw integers so the fold stays exact.
    dailies: dict[str, dict[tuple[str, str], int]] = {v: {} for v in agg.VARIABLES}
    total = world.count(str(year)) or 1
    seen = 0
    last_pct = 0
    for doc in world.iter_docs(str(year)):
        seen += 1
        if progress is not None:
            pct = min(49, int(seen * 50 / total))
            if pct > last_pct:
                last_pct = pct
                progress(pct)
        if doc["station_id"] not in stations:
            continue
        element = doc["element"]
        if element not in dailies:
            continue
        key = (doc["station_id"], doc["date"])
        bucket = dailies[element]
        if key not in bucket:
            bucket[key] = doc["value"]
        elif element == agg.PRCP:
            bucket[key] += doc["value"]
        elif element == agg.TMIN:
            bucket[key] = min(bucket[key], doc["value"])
        else:
            bucket[key] = max(bucket[key], doc["value"])

    clamped = 0
    daily_counts: dict[str, int] = {}
    monthly_missing: dict[str, int] = {}
    summary_rows: dict[str, list] = {}

    for variable in agg.VARIABLES:
        base_unit = agg.UNIT_MM if variable == agg.PRCP else agg.UNIT_C
        docs = []
        converted: dict[tuple[str, str], float] = {}
        for (station, date_s), raw in sorted(dailies[variable].items()):
            if variable == agg.PRCP and raw < 0:
                raw = 0
                clamped += 1
            value = agg.convert_units(raw, variable, base_unit)
            converted[(station, date_s)] = value
            docs.append(
                {
                    "station_id": station,
                    "date": iso_midnight(int(date_s[0:4]), int(date_s[4:6]), int(date_s[6:8])),
                    "value": value,
                }
            )
        daily_counts[variable] = region.replace_collection(daily_collection(year, variable), docs)

        # Station-months over converted dailies, then the cross-station mean.
        per_station_month: dict[tuple[str, int], list[float]] = {}
        for (station, date_s), value in sorted(converted.items()):
            per_station_month.setdefault((station, int(date_s[4:6])), []).append(value)
        fused_rows = []
        missing = 0
        for month in range(1, 13):
            station_months = [
                agg.monthly_station_value(
                    station, year, month, variable, values, validity_fraction
                )
                for (station, m), values in sorted(per_station_month.items())
                if m == month
            ]
            fused = agg.spatial_fuse(station_months)
            if fused is None:
                missing += 1
            fused_rows.append((month, fused))
        monthly_missing[variable] = missing
        summary_rows[variable] = fused_rows

        monthly_docs = [_monthly_doc(year, month, variable, fused) for month, fused in fused_rows]
        _append_monthly(region, TOTALS[variable], year, monthly_docs)

    if progress is not None:
        progress(100)
    return {
        "database": region.name,
        "year": year,
        "stations_in_scope": len(stations),
        "daily_documents": daily_counts,
        "monthly_missing": monthly_missing,
        "negative_prcp_clamped": clamped,
    }


def _monthly_doc(year: int, month: int, variable: str, fused: float | None) -> dict:
    if variable == agg.PRCP:
        value = {agg.UNIT_MM: MISSING if fused is None else fused}
    else:
        if fused is None:
            value = {agg.UNIT_C: MISSING, agg.UNIT_F: MISSING}
        else:
            value = {agg.UNIT_C: fused, agg.UNIT_F: agg.celsius_to_fahrenheit(fused)}
    return {"year": year, "month": month, "value": value}


def _append_monthly(region: Database, collection: str, year: int, docs: list[dict]) -> None:
    existing = [d for d in region.iter_docs(collection) if d["year"] != year]
    existing.extend(docs)
    existing.sort(key=lambda d: (d["year"], d["month"]))
    region.replace_collection(collection, existing)


def loaded_years(region: Database, variable: str = agg.PRCP) -> list[int]:
    years = {doc["year"] for doc in region.iter_docs(TOTALS[variable])}
    return sorted(years)


def read_monthly_series(
    region: Database,
    variable: str,
    unit: str,
    from_year: int,
    to_year: int,
) -> agg.MonthlySeries:
    """Month-ordered fused values over [from_year, to_year], missing preserved."""
    if unit not in agg.VARIABLE_UNITS.get(variable, ()):
        raise UnitMismatchError(f"{unit!r} is not valid for {variable}")
    if from_year > to_year:
        raise MissingYearError(f"empty year range {from_year}..{to_year}")
    by_month: dict[tuple[int, int], dict] = {}
    for doc in region.iter_docs(TOTALS[variable]):
        by_month[(doc["year"], doc["month"])] = doc["value"]
    values: list[float | None] = []
    for year in range(from_year, to_year + 1):
        for month in range(1, 13):
            if (year, month) not in by_month:
                raise MissingYearError(f"year {year} not loaded in {region.name}")
            raw = by_month[(year, month)].get(unit, MISSING)
            values.append(None if raw == MISSING else float(raw))
    return agg.MonthlySeries(variable, unit, from_year, 1, values)
