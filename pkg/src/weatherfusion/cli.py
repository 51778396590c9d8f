"""Command-line front door over the full pipeline.

Commands print JSON on stdout when piped (or with --json) and aligned tables
on a terminal. Engine failures exit 3 with the E_* code on stderr; usage
errors exit 2.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import aggregation as agg
from . import ghcn, store as store_mod, views as views_mod
from .config import Config, resolve_config
from .errors import EngineError, MalformedError, UnitMismatchError
from .forecast import (
    DEFAULT_LAGS,
    DEFAULT_SEED,
    METHODS,
    MODE_MULTIVARIATE,
    MODE_NBA,
    MODE_UNIVARIATE,
    ForecastResult,
    forecast_nba,
    forecast_standard,
)
from .metrics import evaluate_case

VAR_ALIASES = {
    "rainfall": agg.PRCP,
    "prcp": agg.PRCP,
    "tmin": agg.TMIN,
    "tmax": agg.TMAX,
}
UNIT_ALIASES = {
    "mm": agg.UNIT_MM,
    "c": agg.UNIT_C,
    "celsius": agg.UNIT_C,
    "f": agg.UNIT_F,
    "fahrenheit": agg.UNIT_F,
}

EXIT_ENGINE_ERROR = 3


def parse_variable(name: str) -> str:
    try:
        return VAR_ALIASES[name.lower()]
    except KeyError:
        raise UnitMismatchError(f"unknown variable {name!r} (rainfall, tmin, tmax)") from None


def parse_unit(name: str) -> str:
    try:
        return UNIT_ALIASES[name.lower()]
    except KeyError:
        raise UnitMismatchError(f"unknown unit {name!r} (mm, C, F)") from None


def parse_scope(scope: str) -> tuple[str, str]:
    if ":" not in scope:
        raise MalformedError("scope must be kind:id, e.g. country:JO or station:JOM00040250")
    kind, value = scope.split(":", 1)
    kind = kind.strip().lower()
    if kind not in ("station", "country", "region"):
        raise MalformedError(f"unknown scope kind {kind!r}")
    return kind, value.strip()


def engine_errors(fn):
    """Map EngineError to exit code 3 with the E_* code on stderr."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EngineError as exc:
            click.echo(f"{exc.code}: {exc.message}", err=True)
            sys.exit(EXIT_ENGINE_ERROR)

    return wrapper


def emit(ctx: click.Context, data: dict, text: str | None = None) -> None:
    """JSON in machine mode, the aligned rendering (or pretty JSON) on a tty."""
    machine = ctx.obj["json"] or not sys.stdout.isatty()
    if machine:
        click.echo(json.dumps(data))
    elif text is not None:
        click.echo(text)
    else:
        click.echo(json.dumps(data, indent=2))


def _progress_printer(label: str):
    if not sys.stderr.isatty():
        return None

    def show(pct: int) -> None:
        click.echo(f"\r{label}: {pct:3d}%", err=True, nl=(pct >= 100))

    return show


def get_config(ctx: click.Context) -> Config:
    return ctx.obj["config"]


@click.group()
@click.option("--data-dir", default=None, help="Store directory (WF_DATA_DIR).")
@click.option("--stations-file", default=None, help="ghcnd-stations file (WF_STATIONS).")
@click.option("--country-map", default=None, help="country,name,region CSV (WF_COUNTRY_MAP).")
@click.option("--json", "json_mode", is_flag=True, help="Force JSON output.")
@click.pass_context
def main(ctx, data_dir, stations_file, country_map, json_mode):
    """Weather store, fusion and forecasting toolkit."""
    ctx.ensure_object(dict)
    ctx.obj["config"] = resolve_config(data_dir, stations_file, country_map)
    ctx.obj["json"] = json_mode


@main.command()
@click.argument("year", type=int)
@click.option("--dest", default=None, help="Target directory (default <data-dir>/downloads).")
@click.pass_context
@engine_errors
def download(ctx, year, dest):
    """Download one compressed by-year file."""
    cfg = get_config(ctx)
    dest_dir = Path(dest) if dest else cfg.downloads_dir
    yf = ghcn.download_year(year, dest_dir, _progress_printer(f"download {year}"))
    emit(
        ctx,
        {"year": year, "compressed_path": str(yf.compressed_path), "bytes": yf.compressed_bytes},
        text=f"downloaded {yf.compressed_path} ({yf.compressed_bytes} bytes)",
    )


@main.command()
@click.argument("year", type=int)
@click.option("--csv", "csv_path", default=None, help="Local .csv or .csv.gz instead of downloading.")
@click.option("--keep-quality-flagged", is_flag=True, help="Keep rows with a non-empty Q-flag.")
@click.pass_context
@engine_errors
def ingest(ctx, year, csv_path, keep_quality_flagged):
    """Load one year into the world database (download+unzip+load when needed)."""
    cfg = get_config(ctx)
    if csv_path is None:
        yf = ghcn.download_year(year, cfg.downloads_dir, _progress_printer(f"download {year}"))
        source = yf.compressed_path
    else:
        source = Path(csv_path)
    if str(source).endswith(".gz"):
        source = ghcn.decompress_gz(source, cfg.downloads_dir)
    summary = store_mod.ingest_year(
        source,
        cfg.store.world,
        year,
        _progress_printer(f"ingest {year}"),
        drop_quality_flagged=not keep_quality_flagged,
    )
    emit(ctx, summary, text=json.dumps(summary, indent=2))


@main.group()
def db():
    """Create, load and list scope databases."""


@db.command("create")
@click.argument("scope")
@click.option("--name", default=None, help="Database name (default: scope name).")
@click.option("--overwrite", is_flag=True)
@click.pass_context
@engine_errors
def db_create(ctx, scope, name, overwrite):
    """Create a database for SCOPE (station:ID | country:CC | region:NAME)."""
    cfg = get_config(ctx)
    kind, value = parse_scope(scope)
    stations = cfg.catalog.stations_in_scope(kind, value)
    db_name = (name or cfg.catalog.scope_name(kind, value)).replace("/", "_")
    cfg.store.create_region(db_name, kind, value, [s.station_id for s in stations], overwrite)
    data = {"name": db_name, "scope_kind": kind, "scope_id": value, "stations": len(stations)}
    emit(ctx, data, text=f"created database {db_name!r} ({len(stations)} stations)")


@db.command("load")
@click.argument("name")
@click.argument("year", type=int)
@click.pass_context
@engine_errors
def db_load(ctx, name, year):
    """Aggregate one world year into database NAME."""
    cfg = get_config(ctx)
    summary = store_mod.load_region_year(
        cfg.store.region(name), cfg.store.world, year, _progress_printer(f"load {name} {year}")
    )
    emit(ctx, summary, text=json.dumps(summary, indent=2))


@db.command("list")
@click.pass_context
@engine_errors
def db_list(ctx):
    """List scope databases."""
    cfg = get_config(ctx)
    regions = cfg.store.list_regions()
    lines = [f"{r['name']}  [{r.get('scope_kind')}:{r.get('scope_id')}]" for r in regions]
    emit(ctx, {"databases": regions}, text="\n".join(lines) or "(none)")


@main.command()
@click.argument("name")
@click.argument("variable")
@click.argument("unit")
@click.argument("from_year", type=int)
@click.argument("to_year", type=int)
@click.option("--plot", "plot_path", default=None, help="Write a line chart (SVG/PNG) to this path.")
@click.pass_context
@engine_errors
def series(ctx, name, variable, unit, from_year, to_year, plot_path):
    """Print the fused monthly series of one database."""
    cfg = get_config(ctx)
    var = parse_variable(variable)
    series_ = store_mod.read_monthly_series(cfg.store.region(name), var, parse_unit(unit), from_year, to_year)
    data = series_.to_dict()
    if plot_path:
        from .plotting import plot_series

        data["plot"] = str(plot_series(series_, plot_path, title=f"{name}: {variable}"))
    rows = [
        f"{y}-{m:02d}  {'?' if v is None else round(v, 4)}"
        for (y, m), v in (
            (series_.month_at(i), series_.values[i]) for i in range(len(series_.values))
        )
    ]
    rows.append(f"missing rate: {series_.missing_rate:.4f}")
    emit(ctx, data, text="\n".join(rows))


@main.group()
def view():
    """Write minable view files."""


@view.command("standard")
@click.argument("name")
@click.argument("from_year", type=int)
@click.argument("to_year", type=int)
@click.option("--out", "out_path", default=None, help="Output .arff path.")
@click.pass_context
@engine_errors
def view_standard(ctx, name, from_year, to_year, out_path):
    """Standard view (date, rainfall, tmin, tmax) for database NAME."""
    cfg = get_config(ctx)
    out = Path(out_path) if out_path else cfg.views_dir / f"{name}_{from_year}_{to_year}.arff"
    mv = views_mod.write_standard_view(cfg.store.region(name), from_year, to_year, out)
    emit(ctx, mv.to_dict(), text=f"wrote {mv.path} ({mv.row_count} rows)")


@view.command("neighbour")
@click.argument("station_dbs", nargs=-1, required=True)
@click.option("--variable", required=True)
@click.option("--unit", default=None, help="mm for rainfall, C or F for temperatures.")
@click.option("--from", "from_year", type=int, required=True)
@click.option("--to", "to_year", type=int, required=True)
@click.option("--out", "out_path", default=None)
@click.pass_context
@engine_errors
def view_neighbour(ctx, station_dbs, variable, unit, from_year, to_year, out_path):
    """Neighbour view: one row per month and station database."""
    cfg = get_config(ctx)
    var = parse_variable(variable)
    unit_ = parse_unit(unit) if unit else agg.VARIABLE_UNITS[var][0]
    pairs = []
    for db_name in station_dbs:
        database = cfg.store.region(db_name)
        meta = database.read_meta()
        if meta.get("scope_kind") != "station" or len(meta.get("stations", [])) != 1:
            raise MalformedError(f"{db_name!r} is not a station database")
        pairs.append((database, cfg.catalog.station(meta["stations"][0])))
    out = Path(out_path) if out_path else cfg.views_dir / f"neighbour_{var}_{from_year}_{to_year}.arff"
    mv = views_mod.write_neighbour_view(pairs, var, unit_, from_year, to_year, out)
    emit(ctx, mv.to_dict(), text=f"wrote {mv.path} ({mv.row_count} rows)")


@view.command("test")
@click.argument("station_id")
@click.argument("variable")
@click.argument("year", type=int)
@click.option("--out", "out_path", default=None)
@click.pass_context
@engine_errors
def view_test(ctx, station_id, variable, year, out_path):
    """All-missing 12-row view for the station to predict."""
    cfg = get_config(ctx)
    var = parse_variable(variable)
    out = Path(out_path) if out_path else cfg.views_dir / f"test_{station_id}_{year}.arff"
    mv = views_mod.write_test_view(cfg.catalog.station(station_id), var, year, out)
    emit(ctx, mv.to_dict(), text=f"wrote {mv.path} ({mv.row_count} rows)")


@main.command()
@click.option("--view", "view_path", required=True, help="Minable view .arff file.")
@click.option("--mode", type=click.Choice([MODE_UNIVARIATE, MODE_MULTIVARIATE, MODE_NBA]), required=True)
@click.option("--method", type=click.Choice(list(METHODS)), default="gp", show_default=True)
@click.option("--variable", default=None, help="Target variable (standard modes).")
@click.option("--target", "target_station", default=None, help="Station to predict (nba mode).")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--lags", type=int, default=DEFAULT_LAGS, show_default=True, help="Lag window (standard modes).")
@click.option("--unit", default=None, help="Unit carried by the view (nba metadata).")
@click.option("--out", "out_path", default=None, help="Also write the result JSON to this path.")
@click.option("--plot", "plot_path", default=None, help="Write a prediction chart to this path.")
@click.option("--drop-test-view", is_flag=True, help="Delete the auto-generated test view (nba).")
@click.pass_context
@engine_errors
def forecast(ctx, view_path, mode, method, variable, target_station, seed, lags, unit, out_path, plot_path, drop_test_view):
    """Forecast the 12 months after a view's range."""
    cfg = get_config(ctx)
    if mode == MODE_NBA:
        if not target_station:
            raise MalformedError("nba mode needs --target STATION_ID")
        result = forecast_nba(
            view_path,
            cfg.catalog.station(target_station),
            seed=seed,
            keep_test_view=not drop_test_view,
            unit=parse_unit(unit) if unit else None,
        )
    else:
        if not variable:
            raise MalformedError("standard modes need --variable")
        result = forecast_standard(view_path, mode, method, variable, seed=seed, lags=lags)
    data = result.to_dict()
    if out_path:
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        Path(out_path).write_text(json.dumps(data, indent=2), encoding="utf-8")
    if plot_path:
        from .plotting import plot_forecast

        data["plot"] = str(plot_forecast(result, plot_path))
    lines = [f"{y}-{m:02d}  {v:.6f}" for (y, m), v in zip(result.months, result.values)]
    emit(ctx, data, text="\n".join(lines))


@main.command()
@click.option("--forecast", "forecast_path", required=True, help="ForecastResult JSON file.")
@click.option("--db", "db_name", required=True, help="Database holding the actual values.")
@click.option("--plot", "plot_path", default=None, help="Write the overlay chart to this path.")
@click.pass_context
@engine_errors
def evaluate(ctx, forecast_path, db_name, plot_path):
    """Score a stored forecast against a database's fused actuals."""
    cfg = get_config(ctx)
    result = ForecastResult.from_dict(json.loads(Path(forecast_path).read_text(encoding="utf-8")))
    var = parse_variable(result.variable)
    unit = result.unit or agg.VARIABLE_UNITS[var][0]
    years = sorted({y for y, _ in result.months})
    actual_series = store_mod.read_monthly_series(cfg.store.region(db_name), var, unit, years[0], years[-1])
    actual_by_month = {
        actual_series.month_at(i): actual_series.values[i] for i in range(len(actual_series.values))
    }
    actuals = [actual_by_month.get((y, m)) for y, m in result.months]
    report = evaluate_case(result.months, result.values, actuals)
    data = report.to_dict()
    if plot_path:
        from .plotting import plot_evaluation

        data["plot"] = str(plot_evaluation(report, result, plot_path))
    emit(ctx, data, text=report.render_text())


@main.group()
def catalog():
    """Inspect the station catalog."""


@catalog.command("regions")
@click.pass_context
@engine_errors
def catalog_regions(ctx):
    cfg = get_config(ctx)
    emit(ctx, {"regions": cfg.catalog.regions}, text="\n".join(cfg.catalog.regions))


@catalog.command("countries")
@click.option("--region", default=None)
@click.pass_context
@engine_errors
def catalog_countries(ctx, region):
    cfg = get_config(ctx)
    countries = sorted(cfg.catalog.countries.values(), key=lambda c: c.code)
    if region:
        countries = [c for c in countries if c.region == region]
    data = [{"code": c.code, "name": c.name, "region": c.region} for c in countries]
    emit(ctx, {"countries": data}, text="\n".join(f"{c.code}  {c.name}  ({c.region})" for c in countries))


@catalog.command("stations")
@click.option("--country", default=None)
@click.option("--region", default=None)
@click.pass_context
@engine_errors
def catalog_stations(ctx, country, region):
    cfg = get_config(ctx)
    if country:
        stations = cfg.catalog.stations_in_scope("country", country)
    elif region:
        stations = cfg.catalog.stations_in_scope("region", region)
    else:
        stations = [cfg.catalog.stations[sid] for sid in sorted(cfg.catalog.stations)]
    data = [s.to_dict() for s in stations]
    text = "\n".join(f"{s.station_id}  {s.latitude:8.4f} {s.longitude:9.4f}  {s.name}" for s in stations)
    emit(ctx, {"stations": data}, text=text or "(none)")


@catalog.command("map-link")
@click.argument("station_id")
@click.pass_context
@engine_errors
def catalog_map_link(ctx, station_id):
    cfg = get_config(ctx)
    url = cfg.catalog.station_map_link(station_id)
    emit(ctx, {"station_id": station_id, "url": url}, text=url)


@main.command()
@click.option("--addr", default=None, help="Bind address (WF_ADDR).")
@click.option("--port", type=int, default=None, help="Bind port (WF_PORT).")
@click.option("--workers", type=int, default=None, help="Job workers (WF_WORKERS).")
@click.pass_context
@engine_errors
def serve(ctx, addr, port, workers):
    """Run the HTTP service."""
    import uvicorn

    cfg = get_config(ctx)
    cfg = resolve_config(cfg.data_dir, cfg.stations_file, cfg.country_map, addr, port, workers)
    from .service import create_app

    uvicorn.run(create_app(cfg), host=cfg.addr, port=cfg.port, log_level="info")


if __name__ == "__main__":
    main()
