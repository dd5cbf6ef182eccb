"""Shortest-time (STQ) and budget (BQ) answers from a trained runtime model.

The advisor sweeps (nodes, tile) candidates through a model for a fixed
problem size and takes the argmin of predicted runtime (STQ) or predicted
node-hours (BQ). Ties go to fewer nodes, then the smaller tile.

For evaluation, the error charged to a predicted-optimal configuration is the
*measured* objective at that configuration versus the measured optimum, never
the model's own predicted value.
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .data import DEFAULT_GRID, ConfigGrid, Dataset, ProblemSize, group_by_problem
from .metrics import EvalReport, evaluate

__all__ = [
    "DEFAULT_GRID", "ConfigGrid", "ConfigLoss", "Goal", "LookupModel", "OptimalEntry",
    "ProblemSize", "Recommendation", "config_loss_pairs", "evaluate_config_predictions",
    "get_optimal_values", "node_hours", "recommend", "sweep", "write_sweep_csv",
]


class Goal(str, enum.Enum):
    STQ = "stq"
    BQ = "bq"

    @classmethod
    def parse(cls, value: "str | Goal") -> "Goal":
        if isinstance(value, Goal):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown goal {value!r}; expected stq or bq") from None


def node_hours(nodes, runtime_s):
    """Budget of a run: nodes × wall-clock hours."""
    nodes_a = np.asarray(nodes, dtype=float)
    runtime_a = np.asarray(runtime_s, dtype=float)
    if np.any(nodes_a < 1):
        raise ValueError("nodes must be ≥ 1")
    if np.any(~(runtime_a > 0)):
        raise ValueError("runtime_s must be > 0")
    out = nodes_a * runtime_a / 3600.0
    return float(out) if out.ndim == 0 else out


def _objective(goal: Goal, nodes, runtime):
    return runtime if goal == Goal.STQ else np.asarray(nodes, dtype=float) * runtime / 3600.0


@dataclass(frozen=True)
class Recommendation:
    o: int
    v: int
    nodes: int
    tile_size: int
    predicted_runtime_s: float
    predicted_node_hours: float
    goal: Goal

    def as_line(self) -> str:
        return ",".join([
            str(self.o), str(self.v), self.goal.value, str(self.nodes), str(self.tile_size),
            _fmt(self.predicted_runtime_s), _fmt(self.predicted_node_hours),
        ])

    def summary(self) -> str:
        what = "shortest time" if self.goal == Goal.STQ else "smallest budget"
        return (f"(O={self.o}, V={self.v}) {what}: {self.nodes} nodes, tile {self.tile_size}; "
                f"predicted {self.predicted_runtime_s:.2f} s, {self.predicted_node_hours:.2f} node-hours")


def _fmt(x: float) -> str:
    text = f"{x:.4f}".rstrip("0")
    return text + "0" if text.endswith(".") else text


def _problem(problem) -> ProblemSize:
    return problem if isinstance(problem, ProblemSize) else ProblemSize(*problem)


def sweep(model, problem, grid: ConfigGrid = DEFAULT_GRID) -> list[tuple[int, int, float]]:
    """Predicted runtime for every grid cell, nodes outer and tiles inner."""
    p = _problem(problem)
    cells = grid.cells()
    X = np.array([(p.o, p.v, n, t) for n, t in cells], dtype=float)
    pred = np.asarray(model.predict(X), dtype=float)
    if pred.shape != (len(cells),):
        raise ValueError("model returned predictions of the wrong shape")
    return [(n, t, float(r)) for (n, t), r in zip(cells, pred)]


def recommend(model, problem, grid: ConfigGrid = DEFAULT_GRID, goal: Goal | str = Goal.STQ,
              swept: list[tuple[int, int, float]] | None = None) -> Recommendation:
    goal = Goal.parse(goal)
    p = _problem(problem)
    swept = swept if swept is not None else sweep(model, p, grid)
    best = None
    for n, t, r in swept:
        if not np.isfinite(r) or r <= 0:
            continue
        key = (float(_objective(goal, n, r)), n, t)
        if best is None or key < best[0]:
            best = (key, n, t, r)
    if best is None:
        raise ValueError(f"no grid cell has a usable prediction for (O={p.o}, V={p.v})")
    _, n, t, r = best
    return Recommendation(p.o, p.v, n, t, r, node_hours(n, r), goal)


def write_sweep_csv(swept, problem, path_or_file) -> None:
    p = _problem(problem)
    own = not hasattr(path_or_file, "write")
    fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["O", "V", "nodes", "tile_size", "pred_runtime_s", "pred_node_hours"])
        for n, t, r in swept:
            w.writerow([p.o, p.v, n, t, repr(r), repr(n * r / 3600.0)])
    finally:
        if own:
            fh.close()


@dataclass(frozen=True)
class OptimalEntry:
    nodes: int
    tile_size: int
    objective: float
    runtime_s: float


OptimalTable = dict  # (o, v) -> OptimalEntry


def _as_arrays(records, y=None):
    if isinstance(records, Dataset):
        return records.X, records.y if y is None else np.asarray(y, dtype=float)
    if y is None:
        raise ValueError("runtimes are required when records are given as a feature matrix")
    return np.asarray(records, dtype=float), np.asarray(y, dtype=float)


def get_optimal_values(records, y=None, goal: Goal | str = Goal.STQ) -> dict[tuple[int, int], OptimalEntry]:
    """Per (O, V): the record with the smallest runtime (STQ) or node-hours (BQ).

    ``records`` is a Dataset or a feature matrix with ``y`` the matching
    runtimes (measured or predicted).
    """
    goal = Goal.parse(goal)
    X, y = _as_arrays(records, y)
    if len(X) != len(y):
        raise ValueError("records and runtimes differ in length")
    table = {}
    for key, idx in group_by_problem(X).items():
        if not idx:
            raise ValueError(f"empty group {key}")
        best = None
        for i in idx:
            n, t, r = int(X[i, 2]), int(X[i, 3]), float(y[i])
            k = (float(_objective(goal, n, r)), n, t)
            if best is None or k < best[0]:
                best = (k, r)
        (obj, n, t), r = best
        table[key] = OptimalEntry(n, t, obj, r)
    return table


@dataclass(frozen=True)
class ConfigLoss:
    problem: tuple[int, int]
    true_objective: float
    achieved_objective: float
    predicted_config: tuple[int, int]


def config_loss_pairs(test_records, true_optima: Mapping, predicted_optima: Mapping,
                      goal: Goal | str = Goal.STQ, y=None) -> list[ConfigLoss]:
    """Pair each group's true optimum with the measured objective at the predicted config.

    Repeated measurements of the predicted config are averaged.
    """
    goal = Goal.parse(goal)
    X, y = _as_arrays(test_records, y)
    if set(true_optima) != set(predicted_optima):
        raise ValueError("true and predicted optima cover different problem sizes")
    groups = group_by_problem(X)
    out = []
    for key in sorted(true_optima):
        pred = predicted_optima[key]
        cfg = (pred.nodes, pred.tile_size)
        idx = [i for i in groups.get(key, []) if (int(X[i, 2]), int(X[i, 3])) == cfg]
        if not idx:
            raise KeyError(f"predicted config nodes={cfg[0]}, tile={cfg[1]} for (O, V)={key} "
                           "has no measurement in the test records")
        achieved = float(np.mean(_objective(goal, X[idx, 2], y[idx])))
        out.append(ConfigLoss(key, true_optima[key].objective, achieved, cfg))
    return out


def evaluate_config_predictions(test_records, true_optima: Mapping, predicted_optima: Mapping,
                                goal: Goal | str = Goal.STQ, y=None) -> EvalReport:
    pairs = config_loss_pairs(test_records, true_optima, predicted_optima, goal, y)
    return evaluate([p.true_objective for p in pairs], [p.achieved_objective for p in pairs])


class LookupModel:
    """Exact table lookup on (O, V, nodes, tile); unknown configurations predict +inf.

    Useful as a stand-in model for published optimum tables: sweeping it over
    a grid recovers the table's best row.
    """

    def __init__(self, table: Mapping[tuple[int, int, int, int], float]):
        self.table = dict(table)

    @classmethod
    def from_dataset(cls, ds: Dataset) -> "LookupModel":
        sums: dict = {}
        for r in ds.records:
            s = sums.setdefault(r.features, [0.0, 0])
            s[0] += r.runtime_s
            s[1] += 1
        return cls({k: v[0] / v[1] for k, v in sums.items()})

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != 4:
            raise ValueError(f"lookup model expects 4 features, got {X.shape[1]}")
        return np.array([self.table.get(tuple(int(v) for v in row), np.inf) for row in X])

    def to_dict(self) -> dict:
        rows = [[*k, v] for k, v in sorted(self.table.items())]
        return {"schema_version": 1, "spec": {"family": "lookup"}, "rows": rows}

    @classmethod
    def from_dict(cls, d: Mapping) -> "LookupModel":
        return cls({tuple(int(x) for x in row[:4]): float(row[4]) for row in d["rows"]})

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), separators=(",", ":")) + "\n", encoding="utf-8")
