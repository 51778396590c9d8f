"""HTTP facade over the engine: catalog lookups, job-backed long operations
(download / ingest / region load), series reads, view building, forecasting
and evaluation.

Every response uses the envelope {"ok": true, "data": ...} or
{"ok": false, "error": {"code": "E_*", "message": ...}}; long operations
return a job that clients poll at /jobs/{id}.
"""

from __future__ import annotations

import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict, Field

from . import aggregation as agg
from . import ghcn, store as store_mod, views as views_mod
from .cli import parse_unit, parse_variable
from .config import Config
from .errors import BusyError, EngineError, MalformedError, MissingYearError, UnknownScopeError
from .forecast import (
    DEFAULT_LAGS,
    DEFAULT_SEED,
    MODE_NBA,
    ForecastResult,
    forecast_nba,
    forecast_standard,
)
from .metrics import evaluate_case

STATUS_BY_CODE = {
    "E_EXISTS": 409,
    "E_BUSY": 409,
    "E_NETWORK": 503,
    "E_UNKNOWN_SCOPE": 404,
}

JOB_QUEUED = "queued"
JOB_RUNNING = "running"
JOB_DONE = "done"
JOB_FAILED = "failed"


@dataclass
class Job:
    id: str
    kind: str
    state: str = JOB_QUEUED
    progress: int = 0
    message: str = ""
    created_at: float = field(default_factory=time.time)
    updated_at: float = field(default_factory=time.time)
    result: dict | None = None
    error: dict | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "state": self.state,
            "progress": self.progress,
            "message": self.message,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "result": self.result,
            "error": self.error,
        }


class JobManager:
    """Bounded executor with per-resource exclusivity.

    A submit against a key that already has a queued or running job is
    rejected (the HTTP layer maps that to 409).
    """

    def __init__(self, workers: int):
        self._executor = ThreadPoolExecutor(max_workers=max(1, workers))
        self._jobs: dict[str, Job] = {}
        self._active_keys: dict[str, str] = {}
        self._lock = threading.Lock()

    def submit(self, kind: str, key: str, fn: Callable[[Callable[[int], None]], dict]) -> Job:
        with self._lock:
            if key in self._active_keys:
                raise BusyError(f"a {kind} job is already active for {key}")
            job = Job(id=uuid.uuid4().hex[:12], kind=kind)
            self._jobs[job.id] = job
            self._active_keys[key] = job.id

        def progress(pct: int) -> None:
            with self._lock:
                job.progress = max(job.progress, min(100, int(pct)))
                job.updated_at = time.time()

        def run() -> None:
            with self._lock:
                job.state = JOB_RUNNING
                job.updated_at = time.time()
            try:
                result = fn(progress)
            except EngineError as exc:
                with self._lock:
                    job.state = JOB_FAILED
                    job.error = exc.to_dict()
                    job.message = exc.message
                    job.updated_at = time.time()
            except Exception as exc:  # surfaced, never silent
                with self._lock:
                    job.state = JOB_FAILED
                    job.error = {"code": "E_INTERNAL", "message": str(exc)}
                    job.message = str(exc)
                    job.updated_at = time.time()
            else:
                with self._lock:
                    job.state = JOB_DONE
                    job.progress = 100
                    job.result = result
                    job.updated_at = time.time()
            finally:
                with self._lock:
                    self._active_keys.pop(key, None)

        self._executor.submit(run)
        return job

    def get(self, job_id: str) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise UnknownScopeError(f"unknown job {job_id!r}")
        return job

    def list(self) -> list[Job]:
        with self._lock:
            return sorted(self._jobs.values(), key=lambda j: j.created_at)


class CreateDatabaseBody(BaseModel):
    scope_kind: str
    scope_id: str
    name: str | None = None
    overwrite: bool = False


class IngestBody(BaseModel):
    csv: str | None = None
    keep_quality_flagged: bool = False


class CreateViewBody(BaseModel):
    # wire names are "from"/"to"; the pythonic names stay usable too
    model_config = ConfigDict(populate_by_name=True)

    kind: str
    db: str | None = None
    stations: list[str] | None = None
    variable: str | None = None
    unit: str | None = None
    from_year: int | None = Field(default=None, alias="from")
    to_year: int | None = Field(default=None, alias="to")
    test_year: int | None = None
    name: str | None = None


class ForecastBody(BaseModel):
    view: str
    mode: str
    method: str = "gp"
    variable: str | None = None
    target_station: str | None = None
    seed: int = DEFAULT_SEED
    lags: int = DEFAULT_LAGS
    unit: str | None = None


class EvaluateBody(BaseModel):
    forecast: dict
    db: str


def ok(data) -> JSONResponse:
    return JSONResponse({"ok": True, "data": data})


def fail(code: str, message: str) -> JSONResponse:
    status = STATUS_BY_CODE.get(code, 400)
    return JSONResponse({"ok": False, "error": {"code": code, "message": message}}, status_code=status)


def create_app(cfg: Config) -> FastAPI:
    app = FastAPI(title="weatherfusion", version="0.1.0")
    jobs = JobManager(cfg.workers)

    @app.exception_handler(EngineError)
    async def engine_error_handler(_req: Request, exc: EngineError):
        return fail(exc.code, exc.message)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_req: Request, exc: RequestValidationError):
        return fail("E_MALFORMED", str(exc))

    # -- years ------------------------------------------------------------

    @app.post("/years/{year}/download")
    def start_download(year: int):
        ghcn.build_year_url(year)  # validate range before queueing
        job = jobs.submit(
            "download",
            f"download:{year}",
            lambda progress: {
                "compressed_path": str(
                    ghcn.download_year(year, cfg.downloads_dir, progress).compressed_path
                )
            },
        )
        return ok(job.to_dict())

    @app.post("/years/{year}/ingest")
    def start_ingest(year: int, body: IngestBody | None = None):
        body = body or IngestBody()
        if body.csv is None:
            ghcn.build_year_url(year)

        def work(progress):
            if body.csv is not None:
                source = Path(body.csv)
            else:
                half = lambda pct: progress(pct // 2)  # download is the first half
                source = ghcn.download_year(year, cfg.downloads_dir, half).compressed_path
            if str(source).endswith(".gz"):
                source = ghcn.decompress_gz(source, cfg.downloads_dir)
            return store_mod.ingest_year(
                source,
                cfg.store.world,
                year,
                lambda pct: progress(50 + pct // 2 if body.csv is None else pct),
                drop_quality_flagged=not body.keep_quality_flagged,
            )

        return ok(jobs.submit("ingest", "ingest:world", work).to_dict())

    # -- catalog ----------------------------------------------------------

    @app.get("/catalog/regions")
    def catalog_regions():
        return ok({"regions": cfg.catalog.regions})

    @app.get("/catalog/countries")
    def catalog_countries(region: str | None = None):
        countries = sorted(cfg.catalog.countries.values(), key=lambda c: c.code)
        if region is not None:
            countries = [c for c in countries if c.region == region]
        return ok({"countries": [{"code": c.code, "name": c.name, "region": c.region} for c in countries]})

    @app.get("/catalog/stations")
    def catalog_stations(country: str | None = None, region: str | None = None):
        if country:
            stations = cfg.catalog.stations_in_scope("country", country)
        elif region:
            stations = cfg.catalog.stations_in_scope("region", region)
        else:
            stations = [cfg.catalog.stations[sid] for sid in sorted(cfg.catalog.stations)]
        return ok({"stations": [s.to_dict() for s in stations]})

    @app.get("/catalog/stations/{station_id}/map-link")
    def catalog_map_link(station_id: str):
        return ok({"station_id": station_id, "url": cfg.catalog.station_map_link(station_id)})

    # -- databases ----------------------------------------------------------

    @app.get("/databases")
    def list_databases():
        out = []
        for meta in cfg.store.list_regions():
            region = cfg.store.region(meta["name"])
            meta["years"] = store_mod.loaded_years(region)
            out.append(meta)
        return ok({"databases": out})

    @app.post("/databases")
    def create_database(body: CreateDatabaseBody):
        stations = cfg.catalog.stations_in_scope(body.scope_kind, body.scope_id)
        name = (body.name or cfg.catalog.scope_name(body.scope_kind, body.scope_id)).replace("/", "_")
        cfg.store.create_region(
            name, body.scope_kind, body.scope_id, [s.station_id for s in stations], body.overwrite
        )
        return ok({"name": name, "scope_kind": body.scope_kind, "scope_id": body.scope_id, "stations": len(stations)})

    @app.post("/databases/{name}/years/{year}")
    def load_database_year(name: str, year: int):
        region = cfg.store.region(name)  # 404 before queueing when unknown
        if not cfg.store.world.has_collection(str(year)):
            raise MissingYearError(f"year {year} not loaded in the world database")
        job = jobs.submit(
            "load_region",
            f"db:{name}",
            lambda progress: store_mod.load_region_year(region, cfg.store.world, year, progress),
        )
        return ok(job.to_dict())

    @app.get("/databases/{name}/series")
    def database_series(
        name: str,
        variable: str,
        unit: str,
        from_year: int = Query(alias="from"),
        to_year: int = Query(alias="to"),
    ):
        series = store_mod.read_monthly_series(
            cfg.store.region(name), parse_variable(variable), parse_unit(unit), from_year, to_year
        )
        payload = series.to_dict()
        payload["months"] = [
            {"year": y, "month": m}
            for y, m in (series.month_at(i) for i in range(len(series.values)))
        ]
        return ok(payload)

    # -- views --------------------------------------------------------------

    @app.get("/views")
    def list_views():
        out = []
        if cfg.views_dir.is_dir():
            for path in sorted(cfg.views_dir.glob("*.arff")):
                try:
                    parsed = views_mod.read_view(path)
                except EngineError:
                    continue
                out.append({"path": str(path), "kind": parsed.kind, "rows": len(parsed.rows)})
        return ok({"views": out})

    @app.post("/views")
    def create_view(body: CreateViewBody):
        cfg.views_dir.mkdir(parents=True, exist_ok=True)
        if body.kind == views_mod.KIND_STANDARD:
            if body.db is None or body.from_year is None or body.to_year is None:
                raise MalformedError("standard views need db, from_year, to_year")
            out = cfg.views_dir / (body.name or f"{body.db}_{body.from_year}_{body.to_year}.arff")
            mv = views_mod.write_standard_view(cfg.store.region(body.db), body.from_year, body.to_year, out)
        elif body.kind == views_mod.KIND_NEIGHBOUR:
            if not body.stations or body.variable is None or body.from_year is None or body.to_year is None:
                raise MalformedError("neighbour views need stations, variable, from_year, to_year")
            var = parse_variable(body.variable)
            unit = parse_unit(body.unit) if body.unit else agg.VARIABLE_UNITS[var][0]
            pairs = []
            for db_name in body.stations:
                database = cfg.store.region(db_name)
                meta = database.read_meta()
                if meta.get("scope_kind") != "station" or len(meta.get("stations", [])) != 1:
                    raise MalformedError(f"{db_name!r} is not a station database")
                pairs.append((database, cfg.catalog.station(meta["stations"][0])))
            out = cfg.views_dir / (body.name or f"neighbour_{var}_{body.from_year}_{body.to_year}.arff")
            mv = views_mod.write_neighbour_view(pairs, var, unit, body.from_year, body.to_year, out)
        elif body.kind == views_mod.KIND_TEST:
            if not body.stations or len(body.stations) != 1 or body.variable is None or body.test_year is None:
                raise MalformedError("test views need one station, variable, test_year")
            var = parse_variable(body.variable)
            out = cfg.views_dir / (body.name or f"test_{body.stations[0]}_{body.test_year}.arff")
            mv = views_mod.write_test_view(cfg.catalog.station(body.stations[0]), var, body.test_year, out)
        else:
            raise MalformedError(f"unknown view kind {body.kind!r}")
        return ok(mv.to_dict())

    # -- forecasts and evaluation --------------------------------------------

    @app.post("/forecasts")
    def create_forecast(body: ForecastBody):
        if body.mode == MODE_NBA:
            if not body.target_station:
                raise MalformedError("nba mode needs target_station")
            result = forecast_nba(
                body.view,
                cfg.catalog.station(body.target_station),
                seed=body.seed,
                unit=parse_unit(body.unit) if body.unit else None,
            )
        else:
            if not body.variable:
                raise MalformedError("standard modes need variable")
            result = forecast_standard(
                body.view, body.mode, body.method, body.variable, seed=body.seed, lags=body.lags
            )
        return ok(result.to_dict())

    @app.post("/evaluations")
    def create_evaluation(body: EvaluateBody):
        result = ForecastResult.from_dict(body.forecast)
        var = parse_variable(result.variable)
        unit = result.unit or agg.VARIABLE_UNITS[var][0]
        years = sorted({y for y, _ in result.months})
        series = store_mod.read_monthly_series(cfg.store.region(body.db), var, unit, years[0], years[-1])
        by_month = {series.month_at(i): series.values[i] for i in range(len(series.values))}
        actuals = [by_month.get((y, m)) for y, m in result.months]
        report = evaluate_case(result.months, result.values, actuals)
        return ok(report.to_dict())

    # -- jobs ----------------------------------------------------------------

    @app.get("/jobs")
    def list_jobs():
        return ok({"jobs": [j.to_dict() for j in jobs.list()]})

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        return ok(jobs.get(job_id).to_dict())

    ui_dir = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
