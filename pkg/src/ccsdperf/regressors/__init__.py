"""Regression engines with a uniform fit/predict contract."""

from .gp import GaussianProcessRegressor, KernelParams, log_marginal_likelihood
from .linear import BayesianRidge, KernelRidge, PolynomialRidge
from .model import (
    DEFAULTS,
    Family,
    Model,
    ModelSpec,
    UnsupportedUncertainty,
    fit,
    gp_log_marginal_likelihood,
    load_model,
    predict,
    predict_with_std,
)
from .trees import DecisionTreeRegressor, GradientBoostingRegressor, RandomForestRegressor

__all__ = [
    "BayesianRidge", "DEFAULTS", "DecisionTreeRegressor", "Family", "GaussianProcessRegressor",
    "GradientBoostingRegressor", "KernelParams", "KernelRidge", "Model", "ModelSpec",
    "PolynomialRidge", "RandomForestRegressor", "UnsupportedUncertainty", "fit",
    "gp_log_marginal_likelihood", "load_model", "log_marginal_likelihood", "predict",
    "predict_with_std",
]
