"""Series imputation and lagged supervised datasets for the forecasters."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .. import aggregation as agg
from ..errors import InsufficientDataError

DEFAULT_LAGS = 12


def impute_series(series: agg.MonthlySeries) -> agg.MonthlySeries:
    """Replace missing months by the mean of the same calendar month.

    Observed values are untouched; a calendar month with no valid value in
    the whole range cannot be imputed.
    """
    buckets: dict[int, list[float]] = {m: [] for m in range(1, 13)}
    for idx, value in enumerate(series.values):
        if value is not None:
            buckets[series.month_at(idx)[1]].append(value)
    means: dict[int, float] = {}
    for idx, value in enumerate(series.values):
        if value is not None:
            continue
        month = series.month_at(idx)[1]
        if not buckets[month]:
            raise InsufficientDataError(
                f"calendar month {month} has no valid value in {series.variable}"
            )
        if month not in means:
            means[month] = sum(buckets[month]) / len(buckets[month])
    values = [
        v if v is not None else means[series.month_at(i)[1]] for i, v in enumerate(series.values)
    ]
    return agg.MonthlySeries(series.variable, series.unit, series.start_year, series.start_month, values)


def seasonal_features(month: int) -> tuple[float, float]:
    angle = 2.0 * math.pi * month / 12.0
    return math.sin(angle), math.cos(angle)


@dataclass
class LaggedDataset:
    """Standardized lag matrix plus the parameters to transform new rows.

    ``kept`` masks out zero-variance raw columns; ``feature_mean/std`` cover
    all raw columns so prediction-time rows standardize identically.
    """

    features: np.ndarray
    targets: np.ndarray
    column_names: list[str]
    kept: np.ndarray
    feature_mean: np.ndarray
    feature_std: np.ndarray
    target_mean: float
    target_std: float
    lags: int
    variables: list[str]
    target: str
    start_month: int

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def standardize_rows(self, raw_rows: np.ndarray) -> np.ndarray:
        z = (raw_rows - self.feature_mean) / self.feature_std
        return z[:, self.kept]

    def destandardize_target(self, z: np.ndarray | float) -> np.ndarray | float:
        return z * self.target_std + self.target_mean


def raw_feature_row(
    histories: Mapping[str, Sequence[float]],
    variables: Sequence[str],
    lags: int,
    month: int,
    include_seasonal: bool = True,
) -> np.ndarray:
    """Unstandardized feature vector for predicting the given calendar month,
    built from the last ``lags`` values of each input variable."""
    row: list[float] = []
    for var in variables:
        hist = histories[var]
        if len(hist) < lags:
            raise InsufficientDataError(f"{var}: need {lags} history values, have {len(hist)}")
        row.extend(hist[-k] for k in range(1, lags + 1))
    if include_seasonal:
        row.extend(seasonal_features(month))
    return np.asarray(row, dtype=float)


def build_lagged_dataset(
    series_by_var: Mapping[str, Sequence[float]],
    target: str,
    start_month: int = 1,
    lags: int = DEFAULT_LAGS,
    include_seasonal: bool = True,
    variables: Sequence[str] | None = None,
) -> LaggedDataset:
    """Build the supervised matrix: for every month with a full lag window,
    features are lags 1..L of each input variable plus the sin/cos of the
    predicted calendar month; the target is that month's value.

    All columns and the target are standardized to mean 0 / std 1;
    zero-variance columns are dropped (their mask is kept for prediction).
    """
    variables = list(variables) if variables is not None else list(series_by_var)
    lengths = {len(series_by_var[v]) for v in variables}
    if len(lengths) != 1:
        raise InsufficientDataError("input series have differing lengths")
    n = lengths.pop()
    if n <= lags:
        raise InsufficientDataError(f"need more than {lags} months, have {n}")
    names = [f"{v}_lag{k}" for v in variables for k in range(1, lags + 1)]
    if include_seasonal:
        names += ["season_sin", "season_cos"]
    rows = []
    targets = []
    for t in range(lags, n):
        month = (start_month - 1 + t) % 12 + 1
        histories = {v: series_by_var[v][:t] for v in variables}
        rows.append(raw_feature_row(histories, variables, lags, month, include_seasonal))
        targets.append(series_by_var[target][t])
    X = np.vstack(rows)
    y = np.asarray(targets, dtype=float)

    mean = X.mean(axis=0)
    std = X.std(axis=0)
    kept = std > 0.0
    safe_std = np.where(kept, std, 1.0)
    t_mean = float(y.mean())
    t_std = float(y.std())
    if t_std == 0.0:
        t_std = 1.0
    Xz = ((X - mean) / safe_std)[:, kept]
    yz = (y - t_mean) / t_std
    return LaggedDataset(
        features=Xz,
        targets=yz,
        column_names=names,
        kept=kept,
        feature_mean=mean,
        feature_std=safe_std,
        target_mean=t_mean,
        target_std=t_std,
        lags=lags,
        variables=variables,
        target=target,
        start_month=start_month,
    )
