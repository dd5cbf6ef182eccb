"""Regression scores: R², MAE and MAPE (as a fraction)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _pair(y, y_hat) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float).ravel()
    y_hat = np.asarray(y_hat, dtype=float).ravel()
    if y.shape != y_hat.shape:
        raise ValueError(f"length mismatch: {y.size} observed vs {y_hat.size} predicted")
    if y.size == 0:
        raise ValueError("cannot score empty vectors")
    return y, y_hat


def r2_score(y, y_hat) -> float:
    """Coefficient of determination; negative when worse than the mean predictor."""
    y, y_hat = _pair(y, y_hat)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise ValueError("R² is undefined when all observed values are identical")
    ss_res = float(np.sum((y - y_hat) ** 2))
    return 1.0 - ss_res / ss_tot


def mae(y, y_hat) -> float:
    y, y_hat = _pair(y, y_hat)
    return float(np.mean(np.abs(y - y_hat)))


def mape(y, y_hat) -> float:
    """Mean absolute percentage error, returned as a fraction (0.023, not 2.3)."""
    y, y_hat = _pair(y, y_hat)
    if np.any(y == 0):
        raise ValueError("MAPE is undefined when an observed value is zero")
    return float(np.mean(np.abs((y - y_hat) / y)))


@dataclass(frozen=True)
class EvalReport:
    r2: float
    mae: float
    mape: float
    n: int

    def as_row(self) -> dict:
        return {"r2": self.r2, "mae": self.mae, "mape": self.mape, "n": self.n}

    def __str__(self) -> str:
        return f"R2={self.r2:.4f} MAE={self.mae:.4f} MAPE={self.mape:.4f} (n={self.n})"


def evaluate(y, y_hat) -> EvalReport:
    y, y_hat = _pair(y, y_hat)
    return EvalReport(r2_score(y, y_hat), mae(y, y_hat), mape(y, y_hat), int(y.size))
