"""Forecast scoring: normalized mean squared error and directional symmetry.

Both metrics compare an actual series against a predicted one of equal
length. NMSE decomposes into per-month terms whose plain average equals the
overall value; DS scores the sign agreement of consecutive changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import DegenerateError, LengthError, NoOverlapError


@dataclass
class MetricsReport:
    """Per-month and overall scores, plus the (year, month) labels scored."""

    months: list[tuple[int, int]]
    actual: list[float]
    predicted: list[float]
    per_month_nmse: list[float]
    overall_nmse: float
    directions: list[str | None]  # "+" / "-", None for the first month
    overall_ds: float | None  # None when fewer than 2 points
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": len(self.actual),
            "months": [
                {
                    "year": y,
                    "month": m,
                    "actual": a,
                    "predicted": p,
                    "nmse": t,
                    "direction": d,
                }
                for (y, m), a, p, t, d in zip(
                    self.months, self.actual, self.predicted, self.per_month_nmse, self.directions
                )
            ],
            "overall_nmse": self.overall_nmse,
            "overall_ds": self.overall_ds,
            "warnings": self.warnings,
        }

    def render_text(self) -> str:
        """Aligned table: month rows, then an Overall row (Avg / Result)."""
        lines = [f"{'Month':>7}  {'NMSE':>14}  {'DS':>3}"]
        for (y, m), t, d in zip(self.months, self.per_month_nmse, self.directions):
            lines.append(f"{y}-{m:02d}  {t:>14.8f}  {d if d else '':>3}")
        ds = f"{self.overall_ds:.3f}" if self.overall_ds is not None else "NA"
        lines.append(f"{'Overall':>7}  {self.overall_nmse:>14.8f}  {ds}")
        lines.append(f"{'':>7}  {'Avg':>14}  {'Result'}")
        return "\n".join(lines)


def nmse(actual: Sequence[float], predicted: Sequence[float]) -> tuple[list[float], float]:
    """Squared errors normalized by the product of the two series means.

    Returns (per-month terms, overall). Each term is the month's squared
    error over mean(actual)*mean(predicted); the overall value is the plain
    average of the terms.
    """
    if len(actual) != len(predicted):
        raise LengthError("series lengths differ")
    n = len(actual)
    if n == 0:
        raise LengthError("empty series")
    mean_a = sum(actual) / n
    mean_p = sum(predicted) / n
    denom = mean_a * mean_p
    if denom == 0:
        raise DegenerateError("product of series means is zero")
    terms = [(a - p) ** 2 / denom for a, p in zip(actual, predicted)]
    return terms, sum(terms) / n


def directional_symmetry(
    actual: Sequence[float], predicted: Sequence[float]
) -> tuple[list[str | None], float]:
    """Fraction of consecutive steps whose direction of change agrees.

    A zero change on either side counts as agreement. The signs list carries
    "+"/"-" per scored step, with None in the first slot.
    """
    if len(actual) != len(predicted):
        raise LengthError("series lengths differ")
    n = len(actual)
    if n < 2:
        raise LengthError("directional symmetry needs at least 2 points")
    signs: list[str | None] = [None]
    hits = 0
    for i in range(1, n):
        agree = (actual[i] - actual[i - 1]) * (predicted[i] - predicted[i - 1]) >= 0
        signs.append("+" if agree else "-")
        hits += 1 if agree else 0
    return signs, hits / (n - 1)


def evaluate_case(
    forecast_months: Sequence[tuple[int, int]],
    predicted: Sequence[float],
    actual: Sequence[float | None],
) -> MetricsReport:
    """Score a forecast against actuals aligned month by month.

    Months whose actual value is missing are dropped pairwise (with a
    warning); at least one overlapping month is required.
    """
    if not (len(forecast_months) == len(predicted) == len(actual)):
        raise LengthError("forecast months, predictions and actuals must align")
    months: list[tuple[int, int]] = []
    acts: list[float] = []
    preds: list[float] = []
    warnings: list[str] = []
    for (y, m), p, a in zip(forecast_months, predicted, actual):
        if a is None:
            warnings.append(f"actual value missing for {y}-{m:02d}; month excluded")
            continue
        months.append((y, m))
        acts.append(a)
        preds.append(p)
    if not months:
        raise NoOverlapError("no overlapping months with actual values")
    terms, overall = nmse(acts, preds)
    mean_a = sum(acts) / len(acts)
    mean_p = sum(preds) / len(preds)
    if mean_a * mean_p < 0:
        warnings.append("series means have opposite signs; NMSE sign is negative")
    if len(acts) >= 2:
        signs, ds = directional_symmetry(acts, preds)
    else:
        signs, ds = [None], None
    return MetricsReport(
        months=months,
        actual=acts,
        predicted=preds,
        per_month_nmse=terms,
        overall_nmse=overall,
        directions=signs,
        overall_ds=ds,
        warnings=warnings,
    )
