"""Directory of regions, countries and stations used for scoping and lookups.

The catalog is immutable after load: stations come from the fixed-width
stations file, the country-to-region placement from a packaged CSV table
(``data/country_regions.csv``) that users can replace with their own.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import MalformedError, UnknownCountryError, UnknownScopeError
from .ghcn import parse_station_line
from .numfmt import fmt_number

SCOPE_STATION = "station"
SCOPE_COUNTRY = "country"
SCOPE_REGION = "region"
SCOPE_KINDS = (SCOPE_STATION, SCOPE_COUNTRY, SCOPE_REGION)


@dataclass(frozen=True)
class StationMeta:
    station_id: str
    name: str
    country_code: str
    country_name: str
    region: str
    latitude: float
    longitude: float
    elevation: float | None

    def to_dict(self) -> dict:
        return {
            "station_id": self.station_id,
            "name": self.name,
            "country_code": self.country_code,
            "country_name": self.country_name,
            "region": self.region,
            "latitude": self.latitude,
            "longitude": self.longitude,
            "elevation": self.elevation,
        }


@dataclass(frozen=True)
class Country:
    code: str
    name: str
    region: str


def packaged_country_map() -> Path:
    """Path of the shipped country-to-region table."""
    return Path(str(resources.files("weatherfusion").joinpath("data/country_regions.csv")))


def packaged_stations_sample() -> Path:
    """Path of the bundled stations excerpt used for offline runs."""
    return Path(str(resources.files("weatherfusion").joinpath("data/ghcnd_stations_sample.txt")))


class Catalog:
    """Stations indexed by id, country and region."""

    def __init__(self, countries: dict[str, Country], stations: dict[str, StationMeta]):
        self.countries = countries
        self.stations = stations
        self.regions = sorted({c.region for c in countries.values()})
        self._by_country: dict[str, list[str]] = {}
        self._by_region: dict[str, list[str]] = {}
        for sid in sorted(stations):
            meta = stations[sid]
            self._by_country.setdefault(meta.country_code, []).append(sid)
            self._by_region.setdefault(meta.region, []).append(sid)

    def station(self, station_id: str) -> StationMeta:
        try:
            return self.stations[station_id]
        except KeyError:
            raise UnknownScopeError(f"unknown station {station_id!r}") from None

    def stations_in_scope(self, kind: str, value: str) -> list[StationMeta]:
        """Resolve a scope to its station list.

        A station scope yields exactly one entry, a country scope all
        stations sharing the prefix, a region scope the union over its
        countries. Known-but-empty scopes yield an empty list.
        """
        if kind == SCOPE_STATION:
            return [self.station(value)]
        if kind == SCOPE_COUNTRY:
            if value not in self.countries:
                raise UnknownScopeError(f"unknown country code {value!r}")
            return [self.stations[sid] for sid in self._by_country.get(value, [])]
        if kind == SCOPE_REGION:
            if value not in self.regions:
                raise UnknownScopeError(f"unknown region {value!r}")
            return [self.stations[sid] for sid in self._by_region.get(value, [])]
        raise UnknownScopeError(f"unknown scope kind {kind!r}")

    def scope_name(self, kind: str, value: str) -> str:
        """Human name a database created for this scope takes."""
        if kind == SCOPE_STATION:
            return self.station(value).station_id
        if kind == SCOPE_COUNTRY:
            if value not in self.countries:
                raise UnknownScopeError(f"unknown country code {value!r}")
            return self.countries[value].name
        if kind == SCOPE_REGION:
            if value not in self.regions:
                raise UnknownScopeError(f"unknown region {value!r}")
            return value
        raise UnknownScopeError(f"unknown scope kind {kind!r}")

    def station_map_link(self, station_id: str) -> str:
        meta = self.station(station_id)
        return f"https://www.google.com/maps?q={fmt_number(meta.latitude)},{fmt_number(meta.longitude)}"


def load_country_map(path: Path | str) -> dict[str, Country]:
    countries: dict[str, Country] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            try:
                code = row["country_code"].strip()
                countries[code] = Country(code, row["country_name"].strip(), row["region"].strip())
            except (KeyError, AttributeError) as exc:
                raise MalformedError(f"bad country map row: {row!r}") from exc
    return countries


def load_catalog(stations_file: Path | str, country_map: Path | str | None = None) -> Catalog:
    """Build the catalog from a stations file and the country-region table.

    Duplicate station ids and stations whose country prefix is absent from
    the table are rejected.
    """
    countries = load_country_map(country_map or packaged_country_map())
    stations: dict[str, StationMeta] = {}
    with open(stations_file, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = parse_station_line(line)
            except MalformedError as exc:
                raise MalformedError(f"{stations_file}:{lineno}: {exc.message}") from exc
            if rec.station_id in stations:
                raise MalformedError(f"duplicate station id {rec.station_id}")
            code = rec.station_id[:2]
            country = countries.get(code)
            if country is None:
                raise UnknownCountryError(f"station {rec.station_id}: no country for prefix {code!r}")
            stations[rec.station_id] = StationMeta(
                station_id=rec.station_id,
                name=rec.name,
                country_code=code,
                country_name=country.name,
                region=country.region,
                latitude=rec.latitude,
                longitude=rec.longitude,
                elevation=rec.elevation,
            )
    return Catalog(countries, stations)
