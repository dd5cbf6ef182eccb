"""Exhaustive k-fold cross-validated grid search over model hyperparameters."""

from __future__ import annotations

import csv
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .metrics import mae, mape, r2_score
from .regressors import Family, ModelSpec, fit

SCORERS = {"r2": (r2_score, True), "mae": (mae, False), "mape": (mape, False)}

DEFAULT_GRIDS: dict[Family, dict[str, list]] = {
    Family.GRADIENT_BOOSTING: {"n_estimators": [250, 500, 750, 1000], "max_depth": [5, 10, 15]},
}


@dataclass(frozen=True)
class CVEntry:
    spec: ModelSpec
    fold_scores: tuple[float, ...]
    mean_score: float


@dataclass(frozen=True)
class GridSearchResult:
    best_spec: ModelSpec
    cv_table: tuple[CVEntry, ...]
    scoring: str

    @property
    def best_score(self) -> float:
        return next(e.mean_score for e in self.cv_table if e.spec == self.best_spec)

    def write_csv(self, path_or_file) -> None:
        keys = sorted({k for e in self.cv_table for k in e.spec.hyperparameters})
        k = len(self.cv_table[0].fold_scores)
        own = not hasattr(path_or_file, "write")
        fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["family", *keys, *(f"fold{i}" for i in range(k)), f"mean_{self.scoring}"])
            for e in self.cv_table:
                hp = e.spec.hyperparameters
                w.writerow([e.spec.family.value, *(_cell(hp.get(key)) for key in keys),
                            *(repr(s) for s in e.fold_scores), repr(e.mean_score)])
        finally:
            if own:
                fh.close()


def _cell(v) -> str:
    return "" if v is None else str(v)


def kfold_indices(n: int, k: int, seed: int = 42) -> list[np.ndarray]:
    """Test-index blocks: contiguous chunks of a seeded permutation."""
    if k < 2:
        raise ValueError("k must be ≥ 2")
    if k > n:
        raise ValueError(f"cannot make {k} folds from {n} rows")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(block) for block in np.array_split(perm, k)]


def expand_grid(grid: Mapping[str, Sequence[Any]]) -> list[dict[str, Any]]:
    """Cartesian product in key order, last key varying fastest."""
    if not grid or any(len(v) == 0 for v in grid.values()):
        raise ValueError("grid must be nonempty")
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def grid_search_cv(family, grid: Mapping[str, Sequence[Any]], X, y, k: int = 5,
                   scoring: str = "r2", seed: int = 42, base: Mapping[str, Any] | None = None,
                   n_jobs: int = 1) -> GridSearchResult:
    """Score every grid point on the same folds; best by mean, ties to the earliest point."""
    if scoring not in SCORERS:
        raise ValueError(f"unknown scoring {scoring!r}; expected one of {sorted(SCORERS)}")
    family = Family.parse(family)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if len(X) != len(y):
        raise ValueError("X and y differ in length")
    # build every spec first so an invalid value fails before any fitting
    specs = [ModelSpec(family, {**(base or {}), **point}, seed) for point in expand_grid(grid)]
    folds = kfold_indices(len(y), k, seed)
    score_fn, maximize = SCORERS[scoring]

    def run(spec: ModelSpec) -> CVEntry:
        scores = []
        for test_idx in folds:
            train = np.ones(len(y), dtype=bool)
            train[test_idx] = False
            model = fit(spec, X[train], y[train])
            scores.append(float(score_fn(y[test_idx], model.predict(X[test_idx]))))
        return CVEntry(spec, tuple(scores), float(np.mean(scores)))

    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as ex:
            table = list(ex.map(run, specs))
    else:
        table = [run(s) for s in specs]
    best = table[0]
    for e in table[1:]:
        if (e.mean_score > best.mean_score) if maximize else (e.mean_score < best.mean_score):
            best = e
    return GridSearchResult(best.spec, tuple(table), scoring)


__all__ = ["CVEntry", "DEFAULT_GRIDS", "GridSearchResult", "SCORERS", "expand_grid",
           "grid_search_cv", "kfold_indices"]
