"""Linear-family regressors: polynomial ridge, kernel ridge, Bayesian ridge."""

from __future__ import annotations

from itertools import combinations_with_replacement

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve
from scipy.spatial.distance import cdist


def _check_xy(X, y):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] == 0 or X.shape[0] != y.shape[0]:
        raise ValueError("X and y must be nonempty with matching lengths")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("X and y must be finite")
    return X, y


def polynomial_terms(n_features: int, degree: int) -> list[tuple[int, ...]]:
    """Monomials of total degree 1..degree, interactions included."""
    terms = []
    for k in range(1, degree + 1):
        terms.extend(combinations_with_replacement(range(n_features), k))
    return terms


def expand(X, terms) -> np.ndarray:
    return np.column_stack([np.prod(X[:, list(t)], axis=1) for t in terms])


def _ridge(Phi, y, lam):
    """Intercept + coefficients of min |y - b - Phi w|^2 + lam |w|^2."""
    mu = Phi.mean(axis=0)
    ybar = float(y.mean())
    A = Phi - mu
    G = A.T @ A + lam * np.eye(A.shape[1])
    w = solve(G, A.T @ (y - ybar), assume_a="pos")
    return ybar - float(mu @ w), w


class PolynomialRidge:
    def __init__(self, degree=2, alpha=1e-8):
        self.degree = degree
        self.alpha = alpha

    def fit(self, X, y):
        X, y = _check_xy(X, y)
        self.n_features_ = X.shape[1]
        self.terms_ = polynomial_terms(self.n_features_, self.degree)
        self.intercept_, self.coef_ = _ridge(expand(X, self.terms_), y, self.alpha)
        return self

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features_:
            raise ValueError(f"expected {self.n_features_} features, got shape {X.shape}")
        return self.intercept_ + expand(X, self.terms_) @ self.coef_

    def payload(self) -> dict:
        return {"n_features": self.n_features_, "degree": self.degree,
                "intercept": self.intercept_, "coef": self.coef_.tolist()}

    def load_payload(self, d: dict):
        self.n_features_ = d["n_features"]
        self.degree = d["degree"]
        self.terms_ = polynomial_terms(self.n_features_, self.degree)
        self.intercept_ = d["intercept"]
        self.coef_ = np.asarray(d["coef"], dtype=float)
        return self


class KernelRidge:
    """RBF kernel ridge on mean-centred targets: (K + alpha I) w = y - mean(y)."""

    def __init__(self, alpha=1e-2, length_scale=1.0):
        self.alpha = alpha
        self.length_scale = length_scale

    def _kernel(self, A, B):
        return np.exp(-0.5 * cdist(A, B, "sqeuclidean") / self.length_scale**2)

    def fit(self, X, y):
        X, y = _check_xy(X, y)
        self.X_train_ = X
        self.y_mean_ = float(y.mean())
        K = self._kernel(X, X)
        K[np.diag_indices_from(K)] += self.alpha
        L = cholesky(K, lower=True, check_finite=False)
        self.dual_coef_ = cho_solve((L, True), y - self.y_mean_, check_finite=False)
        return self

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.X_train_.shape[1]:
            raise ValueError(f"expected {self.X_train_.shape[1]} features, got shape {X.shape}")
        return self._kernel(X, self.X_train_) @ self.dual_coef_ + self.y_mean_

    def payload(self) -> dict:
        return {"X_train": self.X_train_.tolist(), "y_mean": self.y_mean_,
                "dual_coef": self.dual_coef_.tolist()}

    def load_payload(self, d: dict):
        self.X_train_ = np.asarray(d["X_train"], dtype=float)
        self.y_mean_ = d["y_mean"]
        self.dual_coef_ = np.asarray(d["dual_coef"], dtype=float)
        return self


class BayesianRidge:
    """Evidence-maximizing Bayesian linear regression.

    Noise precision ``alpha_`` and weight precision ``lambda_`` follow MacKay's
    fixed-point updates, with weak Gamma(1e-6, 1e-6) hyperpriors keeping both
    finite on degenerate data.
    """

    def __init__(self, max_iter=300, tol=1e-3, alpha_1=1e-6, alpha_2=1e-6,
                 lambda_1=1e-6, lambda_2=1e-6):
        self.max_iter = max_iter
        self.tol = tol
        self.alpha_1 = alpha_1
        self.alpha_2 = alpha_2
        self.lambda_1 = lambda_1
        self.lambda_2 = lambda_2

    def fit(self, X, y):
        X, y = _check_xy(X, y)
        n, d = X.shape
        self.n_features_ = d
        x_mean = X.mean(axis=0)
        y_mean = float(y.mean())
        A = X - x_mean
        b = y - y_mean
        eigvals, V = np.linalg.eigh(A.T @ A)
        eigvals = np.maximum(eigvals, 0.0)
        Atb = V.T @ (A.T @ b)
        alpha = 1.0 / (np.var(y) + np.finfo(float).eps)
        lam = 1.0
        self.n_iter_ = 0
        for it in range(1, self.max_iter + 1):
            coef = V @ (alpha * Atb / (lam + alpha * eigvals))
            gamma = float(np.sum(alpha * eigvals / (lam + alpha * eigvals)))
            sse = float(np.sum((b - A @ coef) ** 2))
            new_lam = (gamma + 2 * self.lambda_1) / (float(coef @ coef) + 2 * self.lambda_2)
            new_alpha = (n - gamma + 2 * self.alpha_1) / (sse + 2 * self.alpha_2)
            converged = (abs(new_alpha - alpha) <= self.tol * alpha
                         and abs(new_lam - lam) <= self.tol * lam)
            alpha, lam = new_alpha, new_lam
            self.n_iter_ = it
            if converged:
                break
        self.alpha_, self.lambda_ = float(alpha), float(lam)
        self.coef_ = V @ (alpha * Atb / (lam + alpha * eigvals))
        self.intercept_ = y_mean - float(x_mean @ self.coef_)
        return self

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features_:
            raise ValueError(f"expected {self.n_features_} features, got shape {X.shape}")
        return X @ self.coef_ + self.intercept_

    def payload(self) -> dict:
        return {"n_features": self.n_features_, "alpha": self.alpha_, "lambda": self.lambda_,
                "coef": self.coef_.tolist(), "intercept": self.intercept_}

    def load_payload(self, d: dict):
        self.n_features_ = d["n_features"]
        self.alpha_ = d["alpha"]
        self.lambda_ = d["lambda"]
        self.coef_ = np.asarray(d["coef"], dtype=float)
        self.intercept_ = d["intercept"]
        return self
