"""Uniform fit/predict front end over all regressor families, plus JSON dumps."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from ..data import Scaler, fit_scaler
from .gp import DEFAULT_BOUNDS, GaussianProcessRegressor, KernelParams
from .gp import log_marginal_likelihood as _lml
from .linear import BayesianRidge, KernelRidge, PolynomialRidge
from .trees import DecisionTreeRegressor, GradientBoostingRegressor, RandomForestRegressor

SCHEMA_VERSION = 1


class Family(str, enum.Enum):
    DECISION_TREE = "decision_tree"
    RANDOM_FOREST = "random_forest"
    GRADIENT_BOOSTING = "gradient_boosting"
    GAUSSIAN_PROCESS = "gaussian_process"
    POLYNOMIAL_RIDGE = "polynomial_ridge"
    KERNEL_RIDGE = "kernel_ridge"
    BAYESIAN_RIDGE = "bayesian_ridge"

    @classmethod
    def parse(cls, value: "str | Family") -> "Family":
        if isinstance(value, Family):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"dt": "decision_tree", "rf": "random_forest", "gb": "gradient_boosting",
                   "gp": "gaussian_process", "pr": "polynomial_ridge", "kr": "kernel_ridge",
                   "br": "bayesian_ridge"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown model family {value!r}") from None


TREE_FAMILIES = frozenset({Family.DECISION_TREE, Family.RANDOM_FOREST, Family.GRADIENT_BOOSTING})
UNCERTAINTY_FAMILIES = frozenset({Family.GAUSSIAN_PROCESS, Family.RANDOM_FOREST})

DEFAULTS: dict[Family, dict[str, Any]] = {
    Family.DECISION_TREE: {"max_depth": None, "min_samples_split": 2, "min_samples_leaf": 1},
    Family.RANDOM_FOREST: {"n_estimators": 100, "max_depth": None, "min_samples_split": 2,
                           "min_samples_leaf": 1, "max_features": None, "bootstrap": True},
    Family.GRADIENT_BOOSTING: {"n_estimators": 750, "max_depth": 10, "learning_rate": 0.1,
                               "subsample": 1.0, "min_samples_split": 2, "min_samples_leaf": 1},
    Family.GAUSSIAN_PROCESS: {"signal_variance": 1.0, "length_scale": 1.0, "noise_variance": 1e-2,
                              "optimize": True, "n_restarts": 5, "normalize_y": True},
    Family.POLYNOMIAL_RIDGE: {"degree": 2, "alpha": 1e-8},
    Family.KERNEL_RIDGE: {"alpha": 1e-2, "length_scale": 1.0},
    Family.BAYESIAN_RIDGE: {"max_iter": 300, "tol": 1e-3},
}

_COMMON = {"log_target": False, "log_features": False}


def _positive_int(name, v, allow_none=False):
    if v is None and allow_none:
        return
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
        raise ValueError(f"{name} must be an integer ≥ 1, got {v!r}")


def _positive(name, v, allow_zero=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) \
            or v < 0 or (v == 0 and not allow_zero):
        raise ValueError(f"{name} must be {'≥' if allow_zero else '>'} 0, got {v!r}")


def _validate(family: Family, p: Mapping[str, Any]) -> None:
    for key in ("n_estimators", "min_samples_split", "min_samples_leaf", "degree",
                "max_iter", "n_restarts"):
        if key in p:
            _positive_int(key, p[key])
    if "max_depth" in p:
        _positive_int("max_depth", p["max_depth"], allow_none=family != Family.GRADIENT_BOOSTING)
    if "max_features" in p:
        _positive_int("max_features", p["max_features"], allow_none=True)
    if "min_samples_split" in p and p["min_samples_split"] < 2:
        raise ValueError("min_samples_split must be ≥ 2")
    if "learning_rate" in p and not (0 < p["learning_rate"] <= 1):
        raise ValueError(f"learning_rate must be in (0, 1], got {p['learning_rate']!r}")
    if "subsample" in p and not (0 < p["subsample"] <= 1):
        raise ValueError(f"subsample must be in (0, 1], got {p['subsample']!r}")
    for key in ("alpha", "length_scale", "signal_variance", "tol"):
        if key in p:
            _positive(key, p[key])
    if "noise_variance" in p:
        _positive("noise_variance", p["noise_variance"], allow_zero=True)


@dataclass(frozen=True)
class ModelSpec:
    """Family + hyperparameters + seed. Unset hyperparameters take family defaults.

    Two transforms apply to any family: ``log_target`` fits on log(runtime)
    and exponentiates predictions; ``log_features`` takes the log of every
    input column (all features are counts ≥ 1) before any scaling.
    """

    family: Family
    hyperparameters: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        family = Family.parse(self.family)
        object.__setattr__(self, "family", family)
        allowed = DEFAULTS[family].keys() | _COMMON.keys()
        unknown = set(self.hyperparameters) - allowed
        if unknown:
            raise ValueError(f"unknown hyperparameters for {family.value}: {sorted(unknown)}")
        merged = {**DEFAULTS[family], **_COMMON, **dict(self.hyperparameters)}
        _validate(family, merged)
        object.__setattr__(self, "hyperparameters", merged)

    def with_params(self, **changes) -> "ModelSpec":
        return ModelSpec(self.family, {**self.hyperparameters, **changes}, self.seed)

    def to_dict(self) -> dict:
        return {"family": self.family.value, "hyperparameters": dict(self.hyperparameters),
                "seed": self.seed}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ModelSpec":
        return cls(d["family"], dict(d.get("hyperparameters", {})), int(d.get("seed", 0)))


def _build(spec: ModelSpec, n_jobs: int = 1):
    p = {k: v for k, v in spec.hyperparameters.items() if k not in _COMMON}
    f = spec.family
    if f == Family.DECISION_TREE:
        return DecisionTreeRegressor(**p)
    if f == Family.RANDOM_FOREST:
        return RandomForestRegressor(**p, seed=spec.seed, n_jobs=n_jobs)
    if f == Family.GRADIENT_BOOSTING:
        return GradientBoostingRegressor(**p, seed=spec.seed)
    if f == Family.GAUSSIAN_PROCESS:
        return GaussianProcessRegressor(**p, seed=spec.seed)
    if f == Family.POLYNOMIAL_RIDGE:
        return PolynomialRidge(**p)
    if f == Family.KERNEL_RIDGE:
        return KernelRidge(**p)
    return BayesianRidge(**p)


class UnsupportedUncertainty(TypeError):
    pass


class Model:
    """A fitted regressor with its spec, input scaler and target transform."""

    def __init__(self, spec: ModelSpec, estimator, scaler: Scaler | None, n_features: int):
        self.spec = spec
        self.estimator = estimator
        self.scaler = scaler
        self.n_features = n_features

    @property
    def family(self) -> Family:
        return self.spec.family

    @property
    def supports_std(self) -> bool:
        return self.family in UNCERTAINTY_FAMILIES

    def _inputs(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise ValueError(f"model expects {self.n_features} features, got {X.shape[1]}")
        if self.spec.hyperparameters["log_features"]:
            X = np.log(X)
        return self.scaler.transform(X) if self.scaler is not None else X

    def predict_fit_space(self, X) -> np.ndarray:
        """Predictions in the space the estimator was fit in (log seconds under log_target)."""
        return self.estimator.predict(self._inputs(X))

    def predict(self, X) -> np.ndarray:
        out = self.predict_fit_space(X)
        return np.exp(out) if self.spec.hyperparameters["log_target"] else out

    def predict_with_std(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Mean and std in seconds (delta method when the target is logged)."""
        if not self.supports_std:
            raise UnsupportedUncertainty(
                f"{self.family.value} has no predictive uncertainty; use GP, RF or a committee")
        mean, std = self.estimator.predict_with_std(self._inputs(X))
        if self.spec.hyperparameters["log_target"]:
            mean = np.exp(mean)
            std = mean * std
        return mean, std

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "spec": self.spec.to_dict(),
            "n_features": self.n_features,
            "scaler": self.scaler.to_dict() if self.scaler is not None else None,
            "payload": self.estimator.payload(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps() + "\n", encoding="utf-8")

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Model":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported model schema_version {d.get('schema_version')!r}")
        spec = ModelSpec.from_dict(d["spec"])
        estimator = _build(spec).load_payload(d["payload"])
        scaler = Scaler.from_dict(d["scaler"]) if d.get("scaler") is not None else None
        return cls(spec, estimator, scaler, int(d["n_features"]))


def fit(spec: ModelSpec, X, y, n_jobs: int = 1) -> Model:
    """Train ``spec`` on (X, y). Non-tree families see standardized inputs."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] == 0:
        raise ValueError("cannot fit on empty data")
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("X and y must be finite")
    if spec.hyperparameters["log_target"]:
        if np.any(y <= 0):
            raise ValueError("log_target requires positive targets")
        y = np.log(y)
    if spec.hyperparameters["log_features"]:
        if np.any(X <= 0):
            raise ValueError("log_features requires positive inputs")
        X = np.log(X)
    scaler = None if spec.family in TREE_FAMILIES else fit_scaler(X)
    Xs = scaler.transform(X) if scaler is not None else X
    estimator = _build(spec, n_jobs).fit(Xs, y)
    return Model(spec, estimator, scaler, X.shape[1])


def predict(model, X) -> np.ndarray:
    return model.predict(X)


def predict_with_std(model, X):
    return model.predict_with_std(X)


def load_model(path: str | Path):
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    if d.get("spec", {}).get("family") == "lookup":
        from ..advisor import LookupModel
        return LookupModel.from_dict(d)
    return Model.from_dict(d)


def gp_log_marginal_likelihood(params: KernelParams, X, y) -> float:
    return _lml(params, X, y)


__all__ = [
    "DEFAULT_BOUNDS", "DEFAULTS", "Family", "KernelParams", "Model", "ModelSpec",
    "UnsupportedUncertainty", "fit", "gp_log_marginal_likelihood", "load_model",
    "predict", "predict_with_std",
]
