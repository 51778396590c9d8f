"""Forecast drivers: standard (univariate/multivariate) lag models rolled
forward 12 months, and neighbour-based prediction with bagged trees."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import aggregation as agg
from ..catalog import StationMeta
from ..errors import InsufficientDataError, MalformedError, NumericError
from ..views import (
    COLUMN_VARIABLE,
    KIND_NEIGHBOUR,
    KIND_STANDARD,
    VARIABLE_COLUMN,
    ParsedView,
    read_view,
    standard_series,
    write_test_view,
)
from .lagged import DEFAULT_LAGS, LaggedDataset, build_lagged_dataset, impute_series, raw_feature_row
from .learners import GaussianProcessLearner, LinearRegressionLearner, MLPLearner
from .smo import SMORegressor
from .trees import BaggedTrees

MODE_UNIVARIATE = "univariate"
MODE_MULTIVARIATE = "multivariate"
MODE_NBA = "nba"

METHOD_GP = "gp"
METHOD_LR = "lr"
METHOD_SMO = "smo"
METHOD_MLP = "mlp"
METHOD_BAGGING = "bagging"
METHODS = (METHOD_GP, METHOD_LR, METHOD_SMO, METHOD_MLP, METHOD_BAGGING)

DEFAULT_SEED = 42
HORIZON = 12
NBA_MIN_ROWS = 10

# Order in which the standard view's variables enter multivariate models.
STANDARD_ORDER = (agg.PRCP, agg.TMIN, agg.TMAX)


@dataclass
class ForecastResult:
    mode: str
    method: str
    variable: str  # column name: rainfall / tmin / tmax
    unit: str | None
    source_view: str
    seed: int
    months: list[tuple[int, int]]
    values: list[float]
    test_view: str | None = None

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "method": self.method,
            "variable": self.variable,
            "unit": self.unit,
            "source_view": self.source_view,
            "seed": self.seed,
            "test_view": self.test_view,
            "predictions": [
                {"year": y, "month": m, "value": v}
                for (y, m), v in zip(self.months, self.values)
            ],
        }

    @staticmethod
    def from_dict(data: dict) -> "ForecastResult":
        preds = data["predictions"]
        return ForecastResult(
            mode=data["mode"],
            method=data["method"],
            variable=data["variable"],
            unit=data.get("unit"),
            source_view=data.get("source_view", ""),
            seed=data.get("seed", DEFAULT_SEED),
            months=[(p["year"], p["month"]) for p in preds],
            values=[p["value"] for p in preds],
            test_view=data.get("test_view"),
        )


@dataclass
class FittedModel:
    """A learner plus the standardization that maps raw lag rows to it."""

    method: str
    dataset: LaggedDataset
    inner: object
    seed: int

    def predict_raw(self, raw_rows: np.ndarray) -> np.ndarray:
        z = self.dataset.standardize_rows(np.atleast_2d(raw_rows))
        pred = self.inner.predict(z)
        out = np.asarray(self.dataset.destandardize_target(pred), dtype=float)
        if not np.all(np.isfinite(out)):
            raise NumericError(f"{self.method} produced non-finite predictions")
        return out


def train(method: str, dataset: LaggedDataset, seed: int = DEFAULT_SEED) -> FittedModel:
    """Fit one learner on a lagged dataset; deterministic given the seed."""
    method = method.lower()
    X, y = dataset.features, dataset.targets
    if X.shape[0] == 0:
        raise InsufficientDataError("empty training set")
    if method == METHOD_LR:
        inner = LinearRegressionLearner().fit(X, y)
    elif method == METHOD_GP:
        inner = GaussianProcessLearner().fit(X, y)
    elif method == METHOD_SMO:
        inner = SMORegressor().fit(X, y)
    elif method == METHOD_MLP:
        inner = MLPLearner(seed=seed).fit(X, y)
    elif method == METHOD_BAGGING:
        inner = BaggedTrees().fit(X, y, seed=seed)
    else:
        raise MalformedError(f"unknown method {method!r}")
    return FittedModel(method=method, dataset=dataset, inner=inner, seed=seed)


def _resolve_variable(variable: str) -> str:
    if variable in COLUMN_VARIABLE:
        return COLUMN_VARIABLE[variable]
    if variable in VARIABLE_COLUMN:
        return variable
    raise MalformedError(f"unknown variable {variable!r}")


def recursive_forecast(
    models: dict[str, FittedModel],
    histories: dict[str, list[float]],
    variables: list[str],
    lags: int,
    last_month: int,
    horizon: int,
    include_seasonal: bool = True,
) -> dict[str, list[float]]:
    """Roll all models forward jointly, feeding each step's predictions back
    into the lag windows."""
    histories = {v: list(histories[v]) for v in variables}
    out: dict[str, list[float]] = {v: [] for v in models}
    month = last_month
    for _ in range(horizon):
        month = month % 12 + 1
        row = raw_feature_row(histories, variables, lags, month, include_seasonal)
        step = {v: float(model.predict_raw(row)[0]) for v, model in models.items()}
        for v in variables:
            histories[v].append(step.get(v, histories[v][-1]))
        for v, value in step.items():
            out[v].append(value)
    return out


def forecast_standard(
    view: ParsedView | str | Path,
    mode: str,
    method: str,
    variable: str,
    seed: int = DEFAULT_SEED,
    lags: int = DEFAULT_LAGS,
    include_seasonal: bool = True,
) -> ForecastResult:
    """Forecast the 12 months after a standard view's range.

    Univariate mode trains on the target's own lags; multivariate trains one
    model per variable over all three variables' lags and rolls them forward
    together, returning the target's values.
    """
    source = ""
    if not isinstance(view, ParsedView):
        source = str(view)
        view = read_view(view)
    if view.kind != KIND_STANDARD:
        raise MalformedError("standard analysis needs a standard view")
    if mode not in (MODE_UNIVARIATE, MODE_MULTIVARIATE):
        raise MalformedError(f"unknown mode {mode!r}")
    target = _resolve_variable(variable)
    series = standard_series(view)
    used = [target] if mode == MODE_UNIVARIATE else list(STANDARD_ORDER)
    imputed = {v: impute_series(series[v]) for v in used}
    values = {v: imputed[v].values for v in used}
    start_month = imputed[target].start_month

    models: dict[str, FittedModel] = {}
    for v in used if mode == MODE_MULTIVARIATE else [target]:
        dataset = build_lagged_dataset(
            values,
            target=v,
            start_month=start_month,
            lags=lags,
            include_seasonal=include_seasonal,
            variables=used,
        )
        models[v] = train(method, dataset, seed)

    n = len(values[target])
    last_year, last_month = imputed[target].month_at(n - 1)
    rolled = recursive_forecast(models, values, used, lags, last_month, HORIZON, include_seasonal)
    months = _months_after(last_year, last_month, HORIZON)
    return ForecastResult(
        mode=mode,
        method=method.lower(),
        variable=VARIABLE_COLUMN[target],
        unit=series[target].unit,
        source_view=source,
        seed=seed,
        months=months,
        values=rolled[target],
    )


def _months_after(year: int, month: int, horizon: int) -> list[tuple[int, int]]:
    out = []
    total = year * 12 + (month - 1)
    for k in range(1, horizon + 1):
        t = total + k
        out.append((t // 12, t % 12 + 1))
    return out


def forecast_nba(
    training_view: str | Path,
    target: StationMeta,
    seed: int = DEFAULT_SEED,
    test_view_path: str | Path | None = None,
    keep_test_view: bool = True,
    n_trees: int | None = None,
    unit: str | None = None,
) -> ForecastResult:
    """Neighbour-based analysis: bagged trees over (year, month, latitude,
    longitude, altitude) rows from nearby stations, evaluated on an
    auto-generated test view for the target station."""
    source = str(training_view)
    view = read_view(training_view)
    if view.kind != KIND_NEIGHBOUR:
        raise MalformedError("neighbour-based analysis needs a neighbour view")
    rows = [row for row in view.rows if row[2] is not None]
    if len(rows) < NBA_MIN_ROWS:
        raise InsufficientDataError(
            f"only {len(rows)} usable training rows; need at least {NBA_MIN_ROWS}"
        )
    variable = COLUMN_VARIABLE.get(view.value_column)
    if variable is None:
        raise MalformedError(f"unknown value column {view.value_column!r}")
    test_year = int(max(row[0] for row in view.rows)) + 1

    if test_view_path is None:
        src = Path(source)
        test_view_path = src.with_name(src.stem + "_test.arff")
    descriptor = write_test_view(target, variable, test_year, test_view_path)
    test_rows = read_view(test_view_path).rows

    X = np.asarray([[r[0], r[1], r[3], r[4], r[5]] for r in rows], dtype=float)
    y = np.asarray([r[2] for r in rows], dtype=float)
    bagger = BaggedTrees() if n_trees is None else BaggedTrees(n_trees=n_trees)
    bagger.fit(X, y, seed=seed)
    X_test = np.asarray([[r[0], r[1], r[3], r[4], r[5]] for r in test_rows], dtype=float)
    predictions = bagger.predict(X_test)

    if not keep_test_view:
        Path(test_view_path).unlink(missing_ok=True)
        kept = None
    else:
        kept = descriptor.path
    if unit is None and variable == agg.PRCP:
        unit = agg.UNIT_MM
    return ForecastResult(
        mode=MODE_NBA,
        method=METHOD_BAGGING,
        variable=view.value_column,
        unit=unit,
        source_view=source,
        seed=seed,
        months=[(test_year, m) for m in range(1, 13)],
        values=[float(v) for v in predictions],
        test_view=kept,
    )
