from .model import CriterionScore, LinearModel, RegPath, standardize_columns
from .solvers import (
    alpha_grid,
    enet_objective,
    enet_path,
    fit_elastic_net,
    fit_lasso,
    fit_ols,
    fit_ridge,
    soft_threshold,
)
from .lars import ic_select, lars_path

__all__ = [
    "LinearModel",
    "RegPath",
    "CriterionScore",
    "standardize_columns",
    "soft_threshold",
    "fit_ols",
    "fit_ridge",
    "fit_elastic_net",
    "fit_lasso",
    "enet_path",
    "enet_objective",
    "alpha_grid",
    "lars_path",
    "ic_select",
]
