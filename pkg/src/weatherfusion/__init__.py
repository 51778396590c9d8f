"""weatherfusion: GHCN ingestion, fusion store, minable views and forecasting."""

__version__ = "0.1.0"
