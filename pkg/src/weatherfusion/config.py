"""Runtime wiring: data directory, catalog sources and shared handles.

Resolution order is explicit argument, then environment (WF_DATA_DIR,
WF_STATIONS, WF_COUNTRY_MAP, WF_ADDR, WF_PORT, WF_WORKERS), then defaults.
The default stations file is the bundled sample so offline runs work out of
the box; point WF_STATIONS at a full ghcnd-stations.txt for real use.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import Catalog, load_catalog, packaged_country_map, packaged_stations_sample
from .store import Store

ENV_DATA_DIR = "WF_DATA_DIR"
ENV_STATIONS = "WF_STATIONS"
ENV_COUNTRY_MAP = "WF_COUNTRY_MAP"
ENV_ADDR = "WF_ADDR"
ENV_PORT = "WF_PORT"
ENV_WORKERS = "WF_WORKERS"

DEFAULT_DATA_DIR = "./wf-data"
DEFAULT_ADDR = "127.0.0.1"
DEFAULT_PORT = 8040
DEFAULT_WORKERS = 2


@dataclass
class Config:
    data_dir: Path
    stations_file: Path
    country_map: Path
    addr: str = DEFAULT_ADDR
    port: int = DEFAULT_PORT
    workers: int = DEFAULT_WORKERS
    _catalog: Catalog | None = field(default=None, repr=False)
    _store: Store | None = field(default=None, repr=False)

    @property
    def catalog(self) -> Catalog:
        if self._catalog is None:
            self._catalog = load_catalog(self.stations_file, self.country_map)
        return self._catalog

    @property
    def store(self) -> Store:
        if self._store is None:
            self._store = Store(self.data_dir)
        return self._store

    @property
    def downloads_dir(self) -> Path:
        return self.data_dir / "downloads"

    @property
    def views_dir(self) -> Path:
        return self.data_dir / "views"


def resolve_config(
    data_dir: str | Path | None = None,
    stations_file: str | Path | None = None,
    country_map: str | Path | None = None,
    addr: str | None = None,
    port: int | None = None,
    workers: int | None = None,
) -> Config:
    env = os.environ
    return Config(
        data_dir=Path(data_dir or env.get(ENV_DATA_DIR, DEFAULT_DATA_DIR)),
        stations_file=Path(stations_file or env.get(ENV_STATIONS, packaged_stations_sample())),
        country_map=Path(country_map or env.get(ENV_COUNTRY_MAP, packaged_country_map())),
        addr=addr or env.get(ENV_ADDR, DEFAULT_ADDR),
        port=int(port or env.get(ENV_PORT, DEFAULT_PORT)),
        workers=int(workers or env.get(ENV_WORKERS, DEFAULT_WORKERS)),
    )
