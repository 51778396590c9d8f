"""Minable views: the ARFF files consumed by the forecasting engine.

Three layouts exist. The standard view has a date column plus the three
fused variables for one database; the neighbour view has one row per month
and station with geographic columns; the test view is a neighbour-shaped
file whose value column is all missing. Missing values are the literal
``?``. Dates render with an unpadded month and a literal ``01`` day
(``2016-1-01``), which readers accept alongside the padded form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from . import aggregation as agg
from .catalog import StationMeta
from .errors import (
    EmptyStationListError,
    InsufficientDataError,
    MalformedError,
    MissingYearError,
)
from .numfmt import fmt_number
from .store import Database, read_monthly_series

RELATION = "weather-project"
MISSING = "?"

KIND_STANDARD = "standard"
KIND_NEIGHBOUR = "neighbour"
KIND_TEST = "test"

VARIABLE_COLUMN = {agg.PRCP: "rainfall", agg.TMIN: "tmin", agg.TMAX: "tmax"}
COLUMN_VARIABLE = {v: k for k, v in VARIABLE_COLUMN.items()}

STANDARD_ATTRIBUTES = ("Date", "rainfall", "tmin", "tmax")
GEO_ATTRIBUTES = ("year", "month", None, "latitude", "longitude", "altitude")

_DATE_ROW = re.compile(r"^(\d{4})-(\d{1,2})-(\d{1,2})$")


@dataclass
class MinableView:
    """Descriptor of a written view file."""

    kind: str
    path: str
    from_year: int
    to_year: int
    row_count: int
    variable: str | None = None
    unit: str | None = None
    sources: list[str] = field(default_factory=list)
    stations: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "path": self.path,
            "from_year": self.from_year,
            "to_year": self.to_year,
            "row_count": self.row_count,
            "variable": self.variable,
            "unit": self.unit,
            "sources": self.sources,
            "stations": self.stations,
        }


@dataclass
class ParsedView:
    """In-memory form of a view file; rows hold floats, None for missing, and
    (year, month, day) tuples for standard-view dates."""

    kind: str
    relation: str
    attributes: list[str]
    rows: list[list]

    @property
    def value_column(self) -> str:
        if self.kind == KIND_STANDARD:
            raise MalformedError("standard views carry three value columns")
        return self.attributes[2]

    @property
    def variable(self) -> str | None:
        if self.kind == KIND_STANDARD:
            return None
        return COLUMN_VARIABLE.get(self.value_column, self.value_column)


def render_value(value: float | None) -> str:
    return MISSING if value is None else fmt_number(value)


def encode_coordinate(degrees: float) -> int:
    """Latitude/longitude encoding used by the geographic views (degrees x 10^4)."""
    return round(degrees * 10_000)


def render_date(year: int, month: int) -> str:
    return f"{year}-{month}-01"


def write_standard_view(
    db: Database, from_year: int, to_year: int, out: Path | str
) -> MinableView:
    """Write the per-month fused view (date, rainfall, tmin, tmax) for one database."""
    if from_year > to_year:
        raise MissingYearError(f"empty year range {from_year}..{to_year}")
    rain = read_monthly_series(db, agg.PRCP, agg.UNIT_MM, from_year, to_year)
    tmin = read_monthly_series(db, agg.TMIN, agg.UNIT_C, from_year, to_year)
    tmax = read_monthly_series(db, agg.TMAX, agg.UNIT_C, from_year, to_year)
    lines = [
        f"@relation {RELATION}",
        "@attribute Date date 'yyyy-MM-dd'",
        "@attribute rainfall numeric",
        "@attribute tmin numeric",
        "@attribute tmax numeric",
        "@data",
    ]
    for idx in range(len(rain.values)):
        year, month = rain.month_at(idx)
        lines.append(
            ",".join(
                [
                    render_date(year, month),
                    render_value(rain.values[idx]),
                    render_value(tmin.values[idx]),
                    render_value(tmax.values[idx]),
                ]
            )
        )
    text = "\n".join(lines) + "\n"
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    return MinableView(
        kind=KIND_STANDARD,
        path=str(out),
        from_year=from_year,
        to_year=to_year,
        row_count=len(rain.values),
        sources=[db.name],
    )


def _geo_header(column: str) -> list[str]:
    return [
        f"@relation {RELATION}",
        "@attribute year numeric",
        "@attribute month numeric",
        f"@attribute {column} numeric",
        "@attribute latitude numeric",
        "@attribute longitude numeric",
        "@attribute altitude numeric",
        "@data",
    ]


def _station_coords(meta: StationMeta) -> tuple[int, int, int]:
    if meta.elevation is None:
        raise InsufficientDataError(f"station {meta.station_id} has no elevation on record")
    return (
        encode_coordinate(meta.latitude),
        encode_coordinate(meta.longitude),
        round(meta.elevation),
    )


def write_neighbour_view(
    station_dbs: list[tuple[Database, StationMeta]],
    variable: str,
    unit: str,
    from_year: int,
    to_year: int,
    out: Path | str,
) -> MinableView:
    """Write one row per month and station for a single variable.

    Rows are grouped by station in the given order, chronological within a
    station; latitude/longitude are encoded as degree x 10^4 integers and
    altitude as integer meters.
    """
    if not station_dbs:
        raise EmptyStationListError("neighbour views need at least one station database")
    column = VARIABLE_COLUMN[variable]
    lines = _geo_header(column)
    for db, meta in station_dbs:
        lat, lon, alt = _station_coords(meta)
        series = read_monthly_series(db, variable, unit, from_year, to_year)
        for idx, value in enumerate(series.values):
            year, month = series.month_at(idx)
            lines.append(f"{year},{month},{render_value(value)},{lat},{lon},{alt}")
    text = "\n".join(lines) + "\n"
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    return MinableView(
        kind=KIND_NEIGHBOUR,
        path=str(out),
        from_year=from_year,
        to_year=to_year,
        row_count=12 * (to_year - from_year + 1) * len(station_dbs),
        variable=variable,
        unit=unit,
        sources=[db.name for db, _ in station_dbs],
        stations=[meta.station_id for _, meta in station_dbs],
    )


def write_test_view(
    target: StationMeta, variable: str, test_year: int, out: Path | str
) -> MinableView:
    """Write the 12-row all-missing view for the station to predict."""
    column = VARIABLE_COLUMN[variable]
    lat, lon, alt = _station_coords(target)
    lines = _geo_header(column)
    for month in range(1, 13):
        lines.append(f"{test_year},{month},{MISSING},{lat},{lon},{alt}")
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return MinableView(
        kind=KIND_TEST,
        path=str(out),
        from_year=test_year,
        to_year=test_year,
        row_count=12,
        variable=variable,
        stations=[target.station_id],
    )


def read_view(path: Path | str) -> ParsedView:
    """Parse a view file back into memory, detecting its kind from the header."""
    relation = None
    attributes: list[str] = []
    date_attrs: set[str] = set()
    rows: list[list] = []
    in_data = False
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            lowered = line.lower()
            if not in_data:
                if lowered.startswith("@relation"):
                    relation = line.split(None, 1)[1].strip() if " " in line else ""
                elif lowered.startswith("@attribute"):
                    parts = line.split(None, 2)
                    if len(parts) < 3:
                        raise MalformedError(f"line {lineno}: bad attribute declaration")
                    name, type_s = parts[1], parts[2].strip()
                    if type_s.lower().startswith("date"):
                        date_attrs.add(name)
                    elif type_s.lower() != "numeric":
                        raise MalformedError(f"line {lineno}: unsupported attribute type {type_s!r}")
                    attributes.append(name)
                elif lowered.startswith("@data"):
                    in_data = True
                else:
                    raise MalformedError(f"line {lineno}: unexpected header line {line!r}")
                continue
            fields = line.split(",")
            if len(fields) != len(attributes):
                raise MalformedError(
                    f"line {lineno}: expected {len(attributes)} fields, got {len(fields)}"
                )
            row: list = []
            for name, field_s in zip(attributes, fields):
                field_s = field_s.strip()
                if field_s == MISSING:
                    row.append(None)
                elif name in date_attrs:
                    m = _DATE_ROW.match(field_s)
                    if not m:
                        raise MalformedError(f"line {lineno}: bad date {field_s!r}")
                    row.append((int(m.group(1)), int(m.group(2)), int(m.group(3))))
                else:
                    try:
                        row.append(float(field_s))
                    except ValueError as exc:
                        raise MalformedError(f"line {lineno}: bad number {field_s!r}") from exc
            rows.append(row)
    if relation is None or not in_data:
        raise MalformedError("missing @relation or @data section")
    kind = _detect_kind(attributes, date_attrs, rows)
    return ParsedView(kind=kind, relation=relation, attributes=attributes, rows=rows)


def _detect_kind(attributes: list[str], date_attrs: set[str], rows: list[list]) -> str:
    if tuple(attributes) == STANDARD_ATTRIBUTES and date_attrs == {"Date"}:
        return KIND_STANDARD
    if len(attributes) == 6 and not date_attrs:
        expected = [a if a is not None else attributes[2] for a in GEO_ATTRIBUTES]
        if attributes == expected:
            if rows and all(row[2] is None for row in rows):
                return KIND_TEST
            return KIND_NEIGHBOUR
    raise MalformedError(f"unrecognized attribute list: {attributes}")


def render_view(view: ParsedView) -> str:
    """Serialize a parsed view back to its file form."""
    if view.kind == KIND_STANDARD:
        lines = [
            f"@relation {view.relation}",
            "@attribute Date date 'yyyy-MM-dd'",
            "@attribute rainfall numeric",
            "@attribute tmin numeric",
            "@attribute tmax numeric",
            "@data",
        ]
        for row in view.rows:
            (year, month, _day), rain, tmin, tmax = row
            lines.append(
                ",".join(
                    [render_date(year, month), render_value(rain), render_value(tmin), render_value(tmax)]
                )
            )
    else:
        lines = _geo_header(view.attributes[2])
        for row in view.rows:
            lines.append(
                ",".join(
                    [
                        fmt_number(row[0]),
                        fmt_number(row[1]),
                        render_value(row[2]),
                        fmt_number(row[3]),
                        fmt_number(row[4]),
                        fmt_number(row[5]),
                    ]
                )
            )
    return "\n".join(lines) + "\n"


def standard_series(view: ParsedView) -> dict[str, agg.MonthlySeries]:
    """Split a standard view into its three monthly series, validating that
    rows are contiguous calendar months."""
    if view.kind != KIND_STANDARD:
        raise MalformedError("not a standard view")
    if not view.rows:
        raise MalformedError("view has no rows")
    start_year, start_month, _ = view.rows[0][0]
    series = {
        agg.PRCP: agg.MonthlySeries(agg.PRCP, agg.UNIT_MM, start_year, start_month),
        agg.TMIN: agg.MonthlySeries(agg.TMIN, agg.UNIT_C, start_year, start_month),
        agg.TMAX: agg.MonthlySeries(agg.TMAX, agg.UNIT_C, start_year, start_month),
    }
    for idx, row in enumerate(view.rows):
        year, month, _ = row[0]
        total = start_year * 12 + (start_month - 1) + idx
        if (year, month) != (total // 12, total % 12 + 1):
            raise MalformedError(f"rows are not contiguous months at {year}-{month}")
        series[agg.PRCP].values.append(row[1])
        series[agg.TMIN].values.append(row[2])
        series[agg.TMAX].values.append(row[3])
    return series
