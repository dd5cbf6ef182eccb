"""Active-learning loops: random sampling, GP uncertainty sampling, GB query-by-committee.

Each iteration fits the strategy's model on the labeled rows, scores it on the
whole pool (labeled rows included), optionally scores its STQ/BQ answers on a
test set, then asks the oracle to label the next batch.
"""

from __future__ import annotations

import csv
import enum
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .advisor import Goal, evaluate_config_predictions, get_optimal_values
from .data import Dataset, format_runtime
from .metrics import EvalReport, evaluate
from .regressors import Model, ModelSpec, fit
from .synth import DEFAULT_PARAMS, CostModelParams, sample_runtime

CHECKPOINT_VERSION = 1


class Strategy(str, enum.Enum):
    RANDOM = "random"
    UNCERTAINTY = "uncertainty"
    COMMITTEE = "committee"

    @classmethod
    def parse(cls, value: "str | Strategy") -> "Strategy":
        if isinstance(value, Strategy):
            return value
        key = str(value).strip().lower()
        aliases = {"rs": "random", "us": "uncertainty", "qc": "committee",
                   "random_sampling": "random", "uncertainty_sampling": "uncertainty",
                   "query_by_committee": "committee"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown strategy {value!r}") from None


# Runtimes span several orders of magnitude, so the loop models work on
# log(runtime) against log-features; predictions are mapped back to seconds.
_LOG = {"log_target": True, "log_features": True}


def default_model_spec(strategy: Strategy, seed: int = 0, gp_restarts: int = 3) -> ModelSpec:
    if strategy == Strategy.UNCERTAINTY:
        return ModelSpec("gaussian_process", {**_LOG, "n_restarts": gp_restarts}, seed)
    return ModelSpec("gradient_boosting", {**_LOG, "n_estimators": 750, "max_depth": 10}, seed)


@dataclass(frozen=True)
class ALConfig:
    strategy: Strategy = Strategy.UNCERTAINTY
    n_initial: int = 50
    query_size: int = 50
    n_queries: int | None = None
    n_committees: int = 5
    goal: Goal | None = None
    seed: int = 42
    committee_report: str = "last"
    diversify_committee: bool = True
    model_spec: ModelSpec | None = None
    gp_restarts: int = 3

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        if self.goal is not None:
            object.__setattr__(self, "goal", Goal.parse(self.goal))
        if self.n_queries is None:
            object.__setattr__(self, "n_queries", 10 if self.strategy == Strategy.COMMITTEE else 20)
        for name in ("n_initial", "query_size", "n_queries", "gp_restarts"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be ≥ 1")
        if self.strategy == Strategy.COMMITTEE and self.n_committees < 2:
            raise ValueError("query-by-committee needs n_committees ≥ 2")
        if self.committee_report not in ("last", "mean"):
            raise ValueError("committee_report must be 'last' or 'mean'")

    @property
    def spec(self) -> ModelSpec:
        return self.model_spec or default_model_spec(self.strategy, self.seed, self.gp_restarts)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "n_initial": self.n_initial,
            "query_size": self.query_size,
            "n_queries": self.n_queries,
            "n_committees": self.n_committees,
            "goal": self.goal.value if self.goal else None,
            "seed": self.seed,
            "committee_report": self.committee_report,
            "diversify_committee": self.diversify_committee,
            "model_spec": self.model_spec.to_dict() if self.model_spec else None,
            "gp_restarts": self.gp_restarts,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ALConfig":
        d = dict(d)
        if d.get("model_spec"):
            d["model_spec"] = ModelSpec.from_dict(d["model_spec"])
        return cls(**d)


@dataclass
class LearningCurvePoint:
    iteration: int
    n_labeled: int
    pool_report: EvalReport | None = None
    config_report: EvalReport | None = None


class OracleError(RuntimeError):
    pass


class LabelsPending(OracleError):
    """The deferred oracle wrote a batch to disk; labels arrive later via ingest."""


class LabelOracle(Protocol):
    def query(self, pool_indices: np.ndarray, rows: np.ndarray) -> np.ndarray: ...


class PoolOracle:
    """Answers from the runtimes already held for the pool (simulation)."""

    def __init__(self, runtimes):
        self.runtimes = np.asarray(runtimes, dtype=float)

    def query(self, pool_indices, rows):
        return self.runtimes[np.asarray(pool_indices, dtype=int)]


class SyntheticOracle:
    """Draws fresh runtimes from the cost model; row ``i`` uses stream (seed, i)."""

    def __init__(self, params: CostModelParams = DEFAULT_PARAMS, seed: int = 0):
        self.params = params
        self.seed = seed

    def query(self, pool_indices, rows):
        return np.array([
            sample_runtime(*(int(v) for v in row), self.params, np.random.default_rng((self.seed, int(i))))
            for i, row in zip(pool_indices, np.asarray(rows))
        ])


class DeferredOracle:
    """Writes requested rows to a pending CSV and stops the loop; never invents labels."""

    def __init__(self, pending_path: str | Path):
        self.pending_path = Path(pending_path)

    def query(self, pool_indices, rows):
        write_pending(self.pending_path, rows)
        raise LabelsPending(f"{len(rows)} experiments written to {self.pending_path}")


def write_pending(path: str | Path, rows) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["O", "V", "nodes", "tile_size"])
        for row in np.asarray(rows):
            w.writerow([int(v) for v in row])


def _top_k(scores: np.ndarray, batch: int) -> np.ndarray:
    # stable sort on the negated score: largest first, ties by lower index
    if batch < 1:
        raise ValueError("batch must be ≥ 1")
    return np.argsort(-np.asarray(scores, dtype=float), kind="stable")[:batch]


def select_uncertainty(model, unlabeled, batch: int) -> np.ndarray:
    """Positions (into ``unlabeled``) of the ``batch`` largest predictive stds."""
    unlabeled = np.asarray(unlabeled, dtype=float)
    if len(unlabeled) == 0:
        return np.empty(0, dtype=int)
    _, std = model.predict_with_std(unlabeled)
    return _top_k(std, batch)


def select_committee(predictions, batch: int) -> np.ndarray:
    """Positions of the ``batch`` rows with the largest committee (population) variance."""
    P = np.asarray(predictions, dtype=float)
    if P.ndim != 2 or P.shape[1] < 2:
        raise ValueError("committee predictions need at least 2 columns")
    return _top_k(P.var(axis=1), batch)


def select_random(unlabeled_count: int, batch: int, seed: int | np.random.Generator = 0) -> np.ndarray:
    if batch < 1:
        raise ValueError("batch must be ≥ 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return rng.choice(unlabeled_count, size=min(batch, unlabeled_count), replace=False)


class Committee:
    """Gradient-boosting members fit on bootstrap resamples (member i uses seed + i)."""

    def __init__(self, members: Sequence[Model], report: str = "last"):
        self.members = list(members)
        self.report = report

    def member_predictions(self, X) -> np.ndarray:
        return np.column_stack([m.predict(X) for m in self.members])

    def disagreement_predictions(self, X) -> np.ndarray:
        # members fit on log(runtime) disagree in log space, i.e. relatively
        return np.column_stack([m.predict_fit_space(X) for m in self.members])

    def predict(self, X) -> np.ndarray:
        if self.report == "mean":
            return self.member_predictions(X).mean(axis=1)
        return self.members[-1].predict(X)


def fit_committee(spec: ModelSpec, X, y, n_members: int, seed: int, diversify: bool = True,
                  report: str = "last", n_jobs: int = 1) -> Committee:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)

    def one(i):
        member_seed = seed + i
        if diversify:
            rows = np.random.default_rng(member_seed).integers(0, len(y), size=len(y))
        else:
            rows = np.arange(len(y))
        return fit(replace(spec, seed=member_seed), X[rows], y[rows])

    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as ex:
            members = list(ex.map(one, range(n_members)))
    else:
        members = [one(i) for i in range(n_members)]
    return Committee(members, report)


class ActiveLearner:
    """Labeled/unlabeled bookkeeping and one-iteration-at-a-time control.

    ``pool_X`` holds candidate configurations. ``pool_y`` (optional) holds
    their true runtimes and is used only for scoring, never for selection.
    """

    def __init__(self, pool_X, cfg: ALConfig, pool_y=None, test: Dataset | None = None,
                 n_jobs: int = 1):
        self.pool_X = np.asarray(pool_X, dtype=float)
        self.pool_y = None if pool_y is None else np.asarray(pool_y, dtype=float)
        self.cfg = cfg
        self.test = test
        self.n_jobs = n_jobs
        n = len(self.pool_X)
        if n < cfg.n_initial:
            raise ValueError(f"pool has {n} rows, fewer than n_initial={cfg.n_initial}")
        if cfg.goal is not None and (test is None or len(test) == 0):
            raise ValueError("a nonempty test set is required when a goal is set")
        self.labels = np.full(n, np.nan)
        self.labeled: list[int] = []
        self.pending: list[int] = []
        self.iteration = 0
        self.curve: list[LearningCurvePoint] = []
        self.rng = np.random.default_rng(cfg.seed)
        self._true_optima = (get_optimal_values(test, goal=cfg.goal)
                             if cfg.goal is not None else None)

    @property
    def unlabeled(self) -> np.ndarray:
        mask = np.isnan(self.labels)
        if self.pending:
            mask[self.pending] = False
        return np.flatnonzero(mask)

    @property
    def done(self) -> bool:
        """No further queries: budget spent or pool exhausted."""
        return bool(self.labeled) and not self.pending and (
            self.iteration >= self.cfg.n_queries or len(self.unlabeled) == 0)

    @property
    def finished(self) -> bool:
        """Done, and the model on the final labeled set has been scored."""
        return self.done and bool(self.curve) and self.curve[-1].n_labeled == len(self.labeled)

    def initial_batch(self) -> np.ndarray:
        """Seed rows (sorted pool indices), marked pending until labeled."""
        if self.labeled or self.pending:
            raise RuntimeError("the initial batch was already drawn")
        batch = np.sort(self.rng.choice(len(self.pool_X), size=self.cfg.n_initial, replace=False))
        self.pending = [int(i) for i in batch]
        return batch

    def add_labels(self, indices, values) -> None:
        """Label exactly the pending batch; completes a query unless it is the seed batch."""
        indices = np.asarray(indices, dtype=int)
        values = np.asarray(values, dtype=float)
        if len(indices) != len(values):
            raise ValueError("indices and labels differ in length")
        if sorted(indices.tolist()) != sorted(self.pending):
            raise ValueError("labels must cover exactly the pending rows")
        if np.any(~np.isfinite(values)) or np.any(values <= 0):
            raise ValueError("labels must be positive and finite")
        seed_batch = not self.labeled
        self.labels[indices] = values
        self.labeled.extend(int(i) for i in indices)
        self.pending = []
        if not seed_batch:
            self.iteration += 1

    def _training_set(self):
        idx = np.array(self.labeled, dtype=int)
        return self.pool_X[idx], self.labels[idx]

    def fit_model(self):
        X, y = self._training_set()
        cfg = self.cfg
        if cfg.strategy == Strategy.COMMITTEE:
            return fit_committee(cfg.spec, X, y, cfg.n_committees, cfg.seed,
                                 cfg.diversify_committee, cfg.committee_report, self.n_jobs)
        return fit(cfg.spec, X, y, n_jobs=self.n_jobs)

    def select(self, model) -> np.ndarray:
        """Pool indices of the next batch (empty when nothing is left)."""
        unl = self.unlabeled
        if len(unl) == 0:
            return np.empty(0, dtype=int)
        q = self.cfg.query_size
        s = self.cfg.strategy
        if s == Strategy.UNCERTAINTY:
            pos = select_uncertainty(model, self.pool_X[unl], q)
        elif s == Strategy.COMMITTEE:
            pos = select_committee(model.disagreement_predictions(self.pool_X[unl]), q)
        else:
            pos = select_random(len(unl), q, self.rng)
        return unl[pos]

    def score(self, model) -> tuple[EvalReport | None, EvalReport | None]:
        pool_report = None
        if self.pool_y is not None:
            pool_report = evaluate(self.pool_y, model.predict(self.pool_X))
        config_report = None
        if self.cfg.goal is not None:
            y_pred = model.predict(self.test.X)
            predicted = get_optimal_values(self.test.X, y_pred, self.cfg.goal)
            config_report = evaluate_config_predictions(
                self.test, self._true_optima, predicted, self.cfg.goal)
        return pool_report, config_report

    def step(self) -> tuple[LearningCurvePoint, np.ndarray]:
        """Fit on the labeled rows, score, and (unless done) pick the next batch.

        The returned point describes the model just fit, so ``n_labeled`` is
        its training-set size. The batch is marked pending until labeled.
        """
        if not self.labeled:
            raise RuntimeError("label the initial batch before stepping")
        if self.pending:
            raise RuntimeError("previous batch is still waiting for labels")
        if self.finished:
            raise RuntimeError("the loop has finished")
        model = self.fit_model()
        pool_report, config_report = self.score(model)
        point = LearningCurvePoint(self.iteration, len(self.labeled), pool_report, config_report)
        self.curve.append(point)
        batch = np.empty(0, dtype=int) if self.done else self.select(model)
        self.pending = [int(i) for i in batch]
        return point, batch

    def final_model(self):
        """Strategy model refit on every labeled row, taken in pool order."""
        idx = np.sort(np.array(self.labeled, dtype=int))
        X, y = self.pool_X[idx], self.labels[idx]
        if self.cfg.strategy == Strategy.COMMITTEE:
            cfg = self.cfg
            return fit_committee(cfg.spec, X, y, cfg.n_committees, cfg.seed,
                                 cfg.diversify_committee, cfg.committee_report, self.n_jobs)
        return fit(self.cfg.spec, X, y, n_jobs=self.n_jobs)

    # checkpointing

    def state_dict(self) -> dict:
        return {
            "version": CHECKPOINT_VERSION,
            "config": self.cfg.to_dict(),
            "pool": self.pool_X.astype(int).tolist(),
            "pool_runtimes": None if self.pool_y is None else self.pool_y.tolist(),
            "test": None if self.test is None else [[*r.features, r.runtime_s] for r in self.test],
            "labeled": list(self.labeled),
            "labels": [float(self.labels[i]) for i in self.labeled],
            "pending": list(self.pending),
            "iteration": self.iteration,
            "rng_state": self.rng.bit_generator.state,
            "curve": [_point_to_dict(p) for p in self.curve],
        }

    @classmethod
    def from_state(cls, d: dict, n_jobs: int = 1) -> "ActiveLearner":
        if d.get("version") != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {d.get('version')!r}")
        test = None
        if d.get("test"):
            rows = np.asarray(d["test"], dtype=float)
            test = Dataset.from_arrays(rows[:, :4], rows[:, 4])
        self = cls(np.asarray(d["pool"], dtype=float), ALConfig.from_dict(d["config"]),
                   d.get("pool_runtimes"), test, n_jobs)
        idx = np.asarray(d["labeled"], dtype=int)
        self.labels[idx] = np.asarray(d["labels"], dtype=float)
        self.labeled = [int(i) for i in idx]
        self.pending = [int(i) for i in d["pending"]]
        self.iteration = int(d["iteration"])
        self.rng.bit_generator.state = d["rng_state"]
        self.curve = [_point_from_dict(p) for p in d["curve"]]
        return self

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.state_dict(), separators=(",", ":")) + "\n",
                              encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, n_jobs: int = 1) -> "ActiveLearner":
        return cls.from_state(json.loads(Path(path).read_text(encoding="utf-8")), n_jobs)


def _point_to_dict(p: LearningCurvePoint) -> dict:
    return {
        "iteration": p.iteration,
        "n_labeled": p.n_labeled,
        "pool": None if p.pool_report is None else p.pool_report.as_row(),
        "config": None if p.config_report is None else p.config_report.as_row(),
    }


def _point_from_dict(d: dict) -> LearningCurvePoint:
    def rep(x):
        return None if x is None else EvalReport(x["r2"], x["mae"], x["mape"], x["n"])
    return LearningCurvePoint(d["iteration"], d["n_labeled"], rep(d["pool"]), rep(d["config"]))


@dataclass
class ALResult:
    curve: list[LearningCurvePoint]
    learner: ActiveLearner = field(repr=False)

    @property
    def labeled_indices(self) -> list[int]:
        return list(self.learner.labeled)


def run_active_learning(pool: Dataset, test: Dataset | None = None, oracle: LabelOracle | None = None,
                        cfg: ALConfig = ALConfig(), n_jobs: int = 1) -> ALResult:
    """Run the loop to completion (``n_queries`` iterations or an exhausted pool)."""
    pool.require_fittable()
    oracle = oracle if oracle is not None else PoolOracle(pool.y)
    learner = ActiveLearner(pool.X, cfg, pool.y, test, n_jobs)
    batch = learner.initial_batch()
    while True:
        learner.add_labels(batch, oracle.query(batch, learner.pool_X[batch]))
        _, batch = learner.step()
        if len(batch) == 0:
            break
    return ALResult(learner.curve, learner)


CURVE_COLUMNS = ["iteration", "n_labeled", "r2", "mae", "mape"]
CONFIG_COLUMNS = ["r2_cfg", "mae_cfg", "mape_cfg"]


def _num(x) -> str:
    return "" if x is None else repr(float(x))


def write_curve_csv(curve: Sequence[LearningCurvePoint], path_or_file) -> None:
    with_cfg = any(p.config_report is not None for p in curve)
    own = not hasattr(path_or_file, "write")
    fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_COLUMNS + (CONFIG_COLUMNS if with_cfg else []))
        for p in curve:
            pr, cr = p.pool_report, p.config_report
            row = [p.iteration, p.n_labeled, _num(pr and pr.r2), _num(pr and pr.mae), _num(pr and pr.mape)]
            if with_cfg:
                row += [_num(cr and cr.r2), _num(cr and cr.mae), _num(cr and cr.mape)]
            w.writerow(row)
    finally:
        if own:
            fh.close()


def read_pending(path: str | Path) -> list[tuple[int, int, int, int]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["O", "V", "nodes", "tile_size"]:
            raise ValueError(f"{path}: expected header O,V,nodes,tile_size")
        return [tuple(int(c) for c in row) for row in reader if row]


__all__ = [
    "ALConfig", "ALResult", "ActiveLearner", "Committee", "DeferredOracle", "LabelOracle",
    "LabelsPending", "LearningCurvePoint", "OracleError", "PoolOracle", "Strategy",
    "SyntheticOracle", "default_model_spec", "fit_committee", "format_runtime", "read_pending",
    "run_active_learning", "select_committee", "select_random", "select_uncertainty",
    "write_curve_csv", "write_pending",
]
