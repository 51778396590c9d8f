"""Forecasting engine: lagged models, base learners and the two analysis paths."""

from .engine import (
    DEFAULT_SEED,
    HORIZON,
    METHOD_BAGGING,
    METHOD_GP,
    METHOD_LR,
    METHOD_MLP,
    METHOD_SMO,
    METHODS,
    MODE_MULTIVARIATE,
    MODE_NBA,
    MODE_UNIVARIATE,
    FittedModel,
    ForecastResult,
    forecast_nba,
    forecast_standard,
    recursive_forecast,
    train,
)
from .lagged import DEFAULT_LAGS, LaggedDataset, build_lagged_dataset, impute_series, raw_feature_row
from .learners import GaussianProcessLearner, LinearRegressionLearner, MLPLearner, median_pairwise_distance, rbf_kernel
from .smo import SMORegressor
from .trees import BaggedTrees, TreeNode, fit_regression_tree

__all__ = [
    "DEFAULT_LAGS",
    "DEFAULT_SEED",
    "HORIZON",
    "METHODS",
    "METHOD_BAGGING",
    "METHOD_GP",
    "METHOD_LR",
    "METHOD_MLP",
    "METHOD_SMO",
    "MODE_MULTIVARIATE",
    "MODE_NBA",
    "MODE_UNIVARIATE",
    "BaggedTrees",
    "FittedModel",
    "ForecastResult",
    "GaussianProcessLearner",
    "LaggedDataset",
    "LinearRegressionLearner",
    "MLPLearner",
    "SMORegressor",
    "TreeNode",
    "build_lagged_dataset",
    "fit_regression_tree",
    "forecast_nba",
    "forecast_standard",
    "impute_series",
    "median_pairwise_distance",
    "raw_feature_row",
    "rbf_kernel",
    "recursive_forecast",
    "train",
]
