"""Gaussian process regression with an isotropic RBF + white-noise kernel.

    k(x, x') = signal_variance * exp(-|x - x'|^2 / (2 length_scale^2)) + noise_variance * [x == x']

Hyperparameters are chosen by maximizing the log marginal likelihood with
L-BFGS-B over log-parameters, restarted from several starting points.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize
from scipy.spatial.distance import cdist

JITTER_START = 1e-10
JITTER_MAX = 1e-6

# log-space search box: signal variance, length scale, noise variance
DEFAULT_BOUNDS = ((1e-3, 1e3), (1e-2, 1e3), (1e-8, 1e1))


class CholeskyError(LinAlgError):
    pass


@dataclass(frozen=True)
class KernelParams:
    signal_variance: float = 1.0
    length_scale: float = 1.0
    noise_variance: float = 1e-2

    def __post_init__(self):
        if not (self.signal_variance > 0 and self.length_scale > 0 and self.noise_variance >= 0):
            raise ValueError(f"invalid kernel parameters {self}")

    def to_log(self) -> np.ndarray:
        return np.log([self.signal_variance, self.length_scale, self.noise_variance])

    @classmethod
    def from_log(cls, theta) -> "KernelParams":
        sf2, ell, sn2 = np.exp(theta)
        return cls(float(sf2), float(ell), float(sn2))


def rbf(XA, XB, params: KernelParams) -> np.ndarray:
    d2 = cdist(XA, XB, "sqeuclidean")
    return params.signal_variance * np.exp(-0.5 * d2 / params.length_scale**2)


def _cholesky_with_jitter(K: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor, escalating diagonal jitter 1e-10 -> 1e-6 on failure."""
    try:
        return cholesky(K, lower=True, check_finite=False), 0.0
    except LinAlgError:
        pass
    jitter = JITTER_START
    eye = np.eye(K.shape[0])
    while jitter <= JITTER_MAX * (1 + 1e-9):
        try:
            return cholesky(K + jitter * eye, lower=True, check_finite=False), jitter
        except LinAlgError:
            jitter *= 10.0
    raise CholeskyError("kernel matrix is not positive definite even with 1e-6 jitter")


def _factor(X, params: KernelParams):
    K = rbf(X, X, params)
    K[np.diag_indices_from(K)] += params.noise_variance
    return _cholesky_with_jitter(K)


def log_marginal_likelihood(params: KernelParams, X, y) -> float:
    """-1/2 y^T alpha - sum(log L_ii) - n/2 log(2 pi), with alpha = (K + noise I)^-1 y."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] == 0:
        raise ValueError("X must be nonempty")
    L, _ = _factor(X, params)
    alpha = cho_solve((L, True), y, check_finite=False)
    n = len(y)
    return float(-0.5 * y @ alpha - np.sum(np.log(np.diag(L))) - 0.5 * n * math.log(2 * math.pi))


def _neg_lml_and_grad(theta, X, y, d2):
    sf2, ell, sn2 = np.exp(theta)
    n = len(y)
    Kf = sf2 * np.exp(-0.5 * d2 / ell**2)
    K = Kf.copy()
    K[np.diag_indices_from(K)] += sn2
    try:
        L, _ = _cholesky_with_jitter(K)
    except CholeskyError:
        return 1e25, np.zeros(3)
    alpha = cho_solve((L, True), y, check_finite=False)
    lml = -0.5 * y @ alpha - np.sum(np.log(np.diag(L))) - 0.5 * n * math.log(2 * math.pi)
    Kinv = cho_solve((L, True), np.eye(n), check_finite=False)
    W = np.outer(alpha, alpha) - Kinv
    grad = np.array([
        0.5 * np.sum(W * Kf),
        0.5 * np.sum(W * (Kf * d2)) / ell**2,
        0.5 * sn2 * np.trace(W),
    ])
    return -lml, -grad


def optimize_hyperparameters(X, y, init: KernelParams = KernelParams(), n_restarts: int = 5,
                             bounds=DEFAULT_BOUNDS, seed: int = 0):
    """Best (params, lml) over ``n_restarts`` local searches.

    The first search starts from ``init`` (clipped into ``bounds``); the rest
    start from log-uniform draws inside ``bounds``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    d2 = cdist(X, X, "sqeuclidean")
    log_bounds = np.log(np.asarray(bounds, dtype=float))
    rng = np.random.default_rng(seed)
    starts = [np.clip(init.to_log(), log_bounds[:, 0], log_bounds[:, 1])]
    for _ in range(max(0, n_restarts - 1)):
        starts.append(rng.uniform(log_bounds[:, 0], log_bounds[:, 1]))
    best_theta, best_val = None, np.inf
    for theta0 in starts:
        f0, _ = _neg_lml_and_grad(theta0, X, y, d2)
        res = minimize(_neg_lml_and_grad, theta0, args=(X, y, d2), jac=True,
                       method="L-BFGS-B", bounds=log_bounds)
        theta, val = (res.x, float(res.fun)) if res.fun <= f0 else (theta0, f0)
        if val < best_val:
            best_theta, best_val = theta, val
    return KernelParams.from_log(best_theta), -best_val


class GaussianProcessRegressor:
    """GP posterior mean and latent standard deviation.

    With ``normalize_y`` the targets are standardized before fitting and the
    kernel parameters refer to the standardized scale. ``predict_with_std``
    returns the std of the latent function (noise excluded) in target units.
    """

    def __init__(self, signal_variance=1.0, length_scale=1.0, noise_variance=1e-2,
                 optimize=True, n_restarts=5, normalize_y=True, bounds=DEFAULT_BOUNDS, seed=0):
        self.init_params = KernelParams(signal_variance, length_scale, noise_variance)
        self.optimize = optimize
        self.n_restarts = n_restarts
        self.normalize_y = normalize_y
        self.bounds = bounds
        self.seed = seed

    def fit(self, X, y):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).ravel()
        if X.shape[0] == 0 or X.shape[0] != y.shape[0]:
            raise ValueError("X and y must be nonempty with matching lengths")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("X and y must be finite")
        if self.normalize_y:
            self.y_mean_ = float(np.mean(y))
            std = float(np.std(y))
            self.y_std_ = std if std > 0 else 1.0
        else:
            self.y_mean_, self.y_std_ = 0.0, 1.0
        z = (y - self.y_mean_) / self.y_std_
        if self.optimize and np.any(z != z[0]):
            self.params_, _ = optimize_hyperparameters(
                X, z, self.init_params, self.n_restarts, self.bounds, self.seed)
        else:
            self.params_ = self.init_params
        self._set_training(X, z)
        return self

    def _set_training(self, X, z):
        self.X_train_ = X
        self.z_train_ = z
        self.L_, self.jitter_ = _factor(X, self.params_)
        self.alpha_ = cho_solve((self.L_, True), z, check_finite=False)
        self.log_marginal_likelihood_ = float(
            -0.5 * z @ self.alpha_ - np.sum(np.log(np.diag(self.L_)))
            - 0.5 * len(z) * math.log(2 * math.pi))

    @property
    def n_features_(self) -> int:
        return self.X_train_.shape[1]

    def _check(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features_:
            raise ValueError(f"expected {self.n_features_} features, got shape {X.shape}")
        return X

    def predict(self, X):
        X = self._check(X)
        Ks = rbf(X, self.X_train_, self.params_)
        return Ks @ self.alpha_ * self.y_std_ + self.y_mean_

    def predict_with_std(self, X):
        X = self._check(X)
        Ks = rbf(X, self.X_train_, self.params_)
        mean = Ks @ self.alpha_ * self.y_std_ + self.y_mean_
        v = solve_triangular(self.L_, Ks.T, lower=True, check_finite=False)
        var = self.params_.signal_variance - np.einsum("ij,ij->j", v, v)
        return mean, np.sqrt(np.maximum(var, 0.0)) * self.y_std_

    def payload(self) -> dict:
        return {
            "params": asdict(self.params_),
            "X_train": self.X_train_.tolist(),
            "z_train": self.z_train_.tolist(),
            "y_mean": self.y_mean_,
            "y_std": self.y_std_,
        }

    def load_payload(self, d: dict):
        self.params_ = KernelParams(**d["params"])
        self.y_mean_ = d["y_mean"]
        self.y_std_ = d["y_std"]
        self._set_training(np.asarray(d["X_train"], dtype=float), np.asarray(d["z_train"], dtype=float))
        return self
