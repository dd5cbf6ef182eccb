"""Tree families: CART regression tree, random forest, gradient boosting."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _cart


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=int)
        for k in range(self.n_nodes):
            if self.feature[k] != _cart.LEAF:
                depths[self.left[k]] = depths[self.right[k]] = depths[k] + 1
        return int(depths.max())

    def predict(self, X: np.ndarray) -> np.ndarray:
        return _cart.predict_tree(X, self.feature, self.threshold, self.left, self.right, self.value)

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_samples": self.n_samples.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(
            np.asarray(d["feature"], dtype=np.int64),
            np.asarray(d["threshold"], dtype=float),
            np.asarray(d["left"], dtype=np.int64),
            np.asarray(d["right"], dtype=np.int64),
            np.asarray(d["value"], dtype=float),
            np.asarray(d["n_samples"], dtype=np.int64),
        )


def presort(X, sample_idx) -> np.ndarray:
    """Rows of ``sample_idx`` stably ordered by each feature, shape (d, m)."""
    cols = X[sample_idx]
    order = np.argsort(cols, axis=0, kind="stable").T
    return np.ascontiguousarray(sample_idx[order], dtype=np.int64)


def grow_tree(X, y, sample_idx=None, *, max_depth=None, min_samples_split=2,
              min_samples_leaf=1, max_features=None, rng=None, sorted_idx=None):
    """Fit one CART tree; returns ``(tree, fitted)`` where ``fitted`` holds in-sample leaf values.

    ``sorted_idx`` may be passed to reuse a :func:`presort` of the same sample.
    """
    X = np.ascontiguousarray(X, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    n, d = X.shape
    if sorted_idx is None:
        if sample_idx is None:
            sample_idx = np.arange(n, dtype=np.int64)
        sorted_idx = presort(X, np.asarray(sample_idx, dtype=np.int64))
    m = sorted_idx.shape[1]
    cap = 2 * m - 1
    if max_features is None or max_features >= d:
        max_features = d
        order = np.ascontiguousarray(np.broadcast_to(np.arange(d, dtype=np.int64), (cap, d)))
    else:
        order = np.argsort(rng.random((cap, d)), axis=1).astype(np.int64)
    result = _cart.build_tree(
        X, y, sorted_idx,
        -1 if max_depth is None else int(max_depth),
        int(min_samples_split), int(min_samples_leaf), int(max_features), order,
    )
    return Tree(*result[:6]), result[6]


def _check_fit_input(X, y):
    X = np.ascontiguousarray(X, dtype=float)
    y = np.ascontiguousarray(y, dtype=float).ravel()
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("X must be a nonempty 2-D matrix")
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("X and y must be finite")
    return X, y


class _Fitted:
    n_features_: int

    def _check_predict_input(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features_:
            raise ValueError(f"expected {self.n_features_} features, got shape {X.shape}")
        return X


class DecisionTreeRegressor(_Fitted):
    def __init__(self, max_depth=None, min_samples_split=2, min_samples_leaf=1):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf

    def fit(self, X, y):
        X, y = _check_fit_input(X, y)
        self.n_features_ = X.shape[1]
        self.tree_, _ = grow_tree(
            X, y, max_depth=self.max_depth, min_samples_split=self.min_samples_split,
            min_samples_leaf=self.min_samples_leaf,
        )
        return self

    def predict(self, X):
        return self.tree_.predict(self._check_predict_input(X))

    def payload(self) -> dict:
        return {"n_features": self.n_features_, "tree": self.tree_.to_dict()}

    def load_payload(self, d: dict):
        self.n_features_ = d["n_features"]
        self.tree_ = Tree.from_dict(d["tree"])
        return self


class RandomForestRegressor(_Fitted):
    """Bagged CART trees with per-split feature subsampling.

    Member ``i`` draws its bootstrap and feature orders from its own stream
    ``(seed, i)``, so results do not depend on ``n_jobs``.
    """

    def __init__(self, n_estimators=100, max_depth=None, min_samples_split=2,
                 min_samples_leaf=1, max_features=None, bootstrap=True, seed=0, n_jobs=1):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.seed = seed
        self.n_jobs = n_jobs

    def _grow_member(self, X, y, i):
        n, d = X.shape
        rng = np.random.default_rng((self.seed, i))
        if self.bootstrap:
            sample_idx = rng.integers(0, n, size=n)
        else:
            sample_idx = np.arange(n)
        max_features = self.max_features or math.ceil(d / 3)
        tree, _ = grow_tree(
            X, y, sample_idx, max_depth=self.max_depth,
            min_samples_split=self.min_samples_split,
            min_samples_leaf=self.min_samples_leaf, max_features=max_features, rng=rng,
        )
        return tree

    def fit(self, X, y):
        X, y = _check_fit_input(X, y)
        self.n_features_ = X.shape[1]
        members = range(self.n_estimators)
        if self.n_jobs and self.n_jobs > 1:
            with ThreadPoolExecutor(self.n_jobs) as pool:
                self.trees_ = list(pool.map(lambda i: self._grow_member(X, y, i), members))
        else:
            self.trees_ = [self._grow_member(X, y, i) for i in members]
        return self

    def member_predictions(self, X) -> np.ndarray:
        X = self._check_predict_input(X)
        return np.column_stack([t.predict(X) for t in self.trees_])

    def predict(self, X):
        return self.member_predictions(X).mean(axis=1)

    def predict_with_std(self, X):
        P = self.member_predictions(X)
        return P.mean(axis=1), P.std(axis=1)

    def payload(self) -> dict:
        return {"n_features": self.n_features_, "trees": [t.to_dict() for t in self.trees_]}

    def load_payload(self, d: dict):
        self.n_features_ = d["n_features"]
        self.trees_ = [Tree.from_dict(t) for t in d["trees"]]
        return self


class GradientBoostingRegressor(_Fitted):
    """Least-squares gradient boosting.

    Stage m fits a CART tree to the residuals ``y - F_{m-1}`` and updates
    ``F_m = F_{m-1} + learning_rate * tree_m``; ``F_0`` is the target mean.
    ``train_loss_[m]`` is the training MSE after stage m (index 0 is F_0).
    """

    def __init__(self, n_estimators=750, max_depth=10, learning_rate=0.1, subsample=1.0,
                 min_samples_split=2, min_samples_leaf=1, seed=0):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.learning_rate = learning_rate
        self.subsample = subsample
        self.min_samples_split = min_samples_split
        self.min_samples_leaf = min_samples_leaf
        self.seed = seed

    def fit(self, X, y):
        X, y = _check_fit_input(X, y)
        n = X.shape[0]
        self.n_features_ = X.shape[1]
        self.base_ = float(np.mean(y))
        F = np.full(n, self.base_)
        rng = np.random.default_rng(self.seed)
        n_sub = max(1, int(round(self.subsample * n)))
        trees = []
        losses = [float(np.mean((y - F) ** 2))]
        full_sort = presort(X, np.arange(n, dtype=np.int64)) if n_sub == n else None
        for _ in range(self.n_estimators):
            residual = y - F
            if n_sub < n:
                sample_idx = np.sort(rng.choice(n, size=n_sub, replace=False))
            else:
                sample_idx = None
            tree, fitted = grow_tree(
                X, residual, sample_idx, max_depth=self.max_depth,
                min_samples_split=self.min_samples_split, min_samples_leaf=self.min_samples_leaf,
                sorted_idx=full_sort,
            )
            if n_sub < n:
                fitted = tree.predict(X)
            F = F + self.learning_rate * fitted
            trees.append(tree)
            losses.append(float(np.mean((y - F) ** 2)))
        self.trees_ = trees
        self.train_loss_ = np.array(losses)
        self._pack()
        return self

    def _pack(self):
        sizes = [t.n_nodes for t in self.trees_]
        self._offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        self._packed = tuple(
            np.ascontiguousarray(np.concatenate([getattr(t, name) for t in self.trees_]))
            for name in ("feature", "threshold", "left", "right", "value")
        )

    def predict(self, X):
        X = self._check_predict_input(X)
        return _cart.predict_boosted(X, self.base_, self.learning_rate, self._offsets, *self._packed)

    def staged_predict(self, X):
        X = self._check_predict_input(X)
        F = np.full(X.shape[0], self.base_)
        for tree in self.trees_:
            F = F + self.learning_rate * tree.predict(X)
            yield F

    def payload(self) -> dict:
        return {
            "n_features": self.n_features_,
            "base": self.base_,
            "learning_rate": self.learning_rate,
            "trees": [t.to_dict() for t in self.trees_],
        }

    def load_payload(self, d: dict):
        self.n_features_ = d["n_features"]
        self.base_ = d["base"]
        self.learning_rate = d["learning_rate"]
        self.trees_ = [Tree.from_dict(t) for t in d["trees"]]
        self._pack()
        return self
