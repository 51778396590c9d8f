"""Temporal aggregation, spatial fusion, unit conversion and missing-value accounting.

Everything here is pure and deterministic: aggregation over a fixed input
order gives bit-identical results, which the store layer relies on (inputs
are always processed in sorted (station, date) order).
"""

from __future__ import annotations

import calendar
import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import EmptyError, UnitMismatchError

PRCP = "PRCP"
TMIN = "TMIN"
TMAX = "TMAX"
VARIABLES = (PRCP, TMIN, TMAX)

UNIT_MM = "mm"
UNIT_C = "C"
UNIT_F = "F"

# Units available per variable; precipitation has no Fahrenheit analogue.
VARIABLE_UNITS = {PRCP: (UNIT_MM,), TMIN: (UNIT_C, UNIT_F), TMAX: (UNIT_C, UNIT_F)}

# A station-month is kept only when at least this fraction of the month's
# days carry a daily aggregate.
DEFAULT_VALIDITY_FRACTION = 0.7


@dataclass
class StationMonth:
    """Monthly aggregate for one station, or missing when coverage is too thin."""

    station_id: str
    year: int
    month: int
    variable: str
    value: float | None
    observed_days: int


@dataclass
class MonthlySeries:
    """Month-ordered fused values for one variable; None marks missing months."""

    variable: str
    unit: str
    start_year: int
    start_month: int
    values: list[float | None] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def missing_rate(self) -> float:
        return missing_rate(self.values)

    def month_at(self, index: int) -> tuple[int, int]:
        """(year, month) of the index-th entry."""
        total = (self.start_year * 12 + self.start_month - 1) + index
        return total // 12, total % 12 + 1

    def to_dict(self) -> dict:
        return {
            "variable": self.variable,
            "unit": self.unit,
            "start_year": self.start_year,
            "start_month": self.start_month,
            "values": self.values,
            "missing_rate": self.missing_rate,
        }


def days_in_month(year: int, month: int) -> int:
    return calendar.monthrange(year, month)[1]


def validity_threshold(year: int, month: int, fraction: float = DEFAULT_VALIDITY_FRACTION) -> int:
    """Minimum observed days for a station-month to count as valid."""
    return math.ceil(fraction * days_in_month(year, month))


def daily_aggregate(values: Sequence[int], variable: str) -> int:
    """Collapse same-day raw readings: sum for PRCP, min for TMIN, max for TMAX."""
    if not values:
        raise EmptyError("no readings to aggregate")
    if variable == PRCP:
        return sum(values)
    if variable == TMIN:
        return min(values)
    if variable == TMAX:
        return max(values)
    raise UnitMismatchError(f"unknown variable {variable!r}")


def convert_units(raw: int, variable: str, target_unit: str) -> float:
    """Raw archive integers (tenths of a unit) to mm / Celsius / Fahrenheit."""
    if target_unit not in VARIABLE_UNITS.get(variable, ()):
        raise UnitMismatchError(f"{target_unit!r} is not valid for {variable}")
    base = raw / 10.0
    if target_unit == UNIT_F:
        return celsius_to_fahrenheit(base)
    return base


def celsius_to_fahrenheit(c: float) -> float:
    return c * 9.0 / 5.0 + 32.0


def fahrenheit_to_celsius(f: float) -> float:
    return (f - 32.0) * 5.0 / 9.0


def monthly_station_value(
    station_id: str,
    year: int,
    month: int,
    variable: str,
    daily_values: Sequence[float],
    validity_fraction: float = DEFAULT_VALIDITY_FRACTION,
) -> StationMonth:
    """Aggregate one station's daily values (converted units) over a month.

    ``daily_values`` holds at most one entry per day, in day order. The month
    value goes missing when fewer days were observed than the validity rule
    requires; missing is a value here, never an error.
    """
    observed = len(daily_values)
    if observed < validity_threshold(year, month, validity_fraction) or observed == 0:
        return StationMonth(station_id, year, month, variable, None, observed)
    if variable == PRCP:
        total = 0.0
        for v in daily_values:
            total += v
        value = total
    elif variable == TMIN:
        value = min(daily_values)
    elif variable == TMAX:
        value = max(daily_values)
    else:
        raise UnitMismatchError(f"unknown variable {variable!r}")
    return StationMonth(station_id, year, month, variable, value, observed)


def spatial_fuse(station_months: Sequence[StationMonth]) -> float | None:
    """Arithmetic mean over the valid station-months; None when none are valid."""
    total = 0.0
    count = 0
    for sm in station_months:
        if sm.value is not None:
            total += sm.value
            count += 1
    if count == 0:
        return None
    return total / count


def missing_rate(values: Sequence[float | None]) -> float:
    """Exact fraction of missing entries."""
    if len(values) == 0:
        raise EmptyError("empty series has no missing rate")
    return sum(1 for v in values if v is None) / len(values)
