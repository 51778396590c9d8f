"""Matplotlib figure rendering for the CLI report paths.

Figures are written to files (SVG/PNG per extension); missing months render
as line gaps.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .aggregation import MonthlySeries
from .forecast import ForecastResult
from .metrics import MetricsReport

UNIT_LABEL = {"mm": "mm", "C": "\N{DEGREE SIGN}C", "F": "\N{DEGREE SIGN}F"}


def _month_axis(series: MonthlySeries) -> list[str]:
    return [f"{y}-{m:02d}" for y, m in (series.month_at(i) for i in range(len(series.values)))]


def plot_series(series: MonthlySeries, out: Path | str, title: str | None = None) -> Path:
    """Line chart of one monthly series; None values become gaps."""
    labels = _month_axis(series)
    values = np.array([np.nan if v is None else v for v in series.values], dtype=float)
    fig, ax = plt.subplots(figsize=(max(6, len(values) * 0.28), 3.6))
    ax.plot(range(len(values)), values, marker="o", markersize=3, linewidth=1.2)
    _style_month_axis(ax, labels)
    unit = UNIT_LABEL.get(series.unit, series.unit)
    ax.set_ylabel(f"{series.variable} ({unit})")
    rate = series.missing_rate
    ax.set_title(title or f"{series.variable} {labels[0]}..{labels[-1]}  (missing {rate:.1%})")
    return _save(fig, out)


def plot_forecast(
    result: ForecastResult,
    out: Path | str,
    actual: list[float | None] | None = None,
) -> Path:
    """Predicted values, optionally overlaid on actuals."""
    labels = [f"{y}-{m:02d}" for y, m in result.months]
    fig, ax = plt.subplots(figsize=(6.5, 3.6))
    ax.plot(range(len(labels)), result.values, marker="o", markersize=3, label=f"predicted ({result.method})")
    if actual is not None:
        vals = np.array([np.nan if v is None else v for v in actual], dtype=float)
        ax.plot(range(len(labels)), vals, marker="s", markersize=3, label="actual")
        ax.legend(fontsize=8)
    _style_month_axis(ax, labels)
    unit = UNIT_LABEL.get(result.unit, result.unit or "")
    ax.set_ylabel(f"{result.variable} ({unit})" if unit else result.variable)
    ax.set_title(f"{result.mode} forecast, {result.variable}")
    return _save(fig, out)


def plot_evaluation(report: MetricsReport, result: ForecastResult, out: Path | str) -> Path:
    """Actual-versus-predicted overlay for the scored months."""
    labels = [f"{y}-{m:02d}" for y, m in report.months]
    fig, ax = plt.subplots(figsize=(6.5, 3.6))
    ax.plot(range(len(labels)), report.predicted, marker="o", markersize=3, label=f"predicted ({result.method})")
    ax.plot(range(len(labels)), report.actual, marker="s", markersize=3, label="actual")
    ax.legend(fontsize=8)
    _style_month_axis(ax, labels)
    ds = f"{report.overall_ds:.3f}" if report.overall_ds is not None else "NA"
    ax.set_title(f"NMSE {report.overall_nmse:.6g}  DS {ds}")
    return _save(fig, out)


def _style_month_axis(ax, labels: list[str]) -> None:
    step = max(1, len(labels) // 24)
    ax.set_xticks(range(0, len(labels), step))
    ax.set_xticklabels(labels[::step], rotation=60, fontsize=7)
    ax.grid(True, alpha=0.3)


def _save(fig, out: Path | str) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    return out
