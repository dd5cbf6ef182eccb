"""Command-line front end: ``ccsdperf <command> [options]``.

Machine-readable output (CSV rows, JSON) goes to stdout or ``--out`` files;
human summaries go to stderr. Exit codes: 0 success, 1 invalid input or
usage, 2 runtime failure.

Option values resolve as: command-line flag, then environment variable
``CCSDPERF_<OPTION>`` (e.g. ``CCSDPERF_SEED``), then ``key = value`` lines
in the file named by ``--config`` (or ``CCSDPERF_CONFIG``), then the
built-in default.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .active import (
    ALConfig,
    ActiveLearner,
    LabelsPending,
    PoolOracle,
    SyntheticOracle,
    run_active_learning,
    write_curve_csv,
    write_pending,
)
from .advisor import (
    Goal,
    LookupModel,
    evaluate_config_predictions,
    get_optimal_values,
    recommend,
    sweep,
    write_sweep_csv,
)
from .data import (
    DEFAULT_GRID,
    ConfigGrid,
    DataError,
    Dataset,
    format_runtime,
    group_by_problem,
    load_csv,
    save_csv,
)
from .metrics import EvalReport, evaluate
from .regressors import ModelSpec, fit, load_model
from .synth import DEFAULT_PARAMS, TABLE3_PROBLEMS, CostModelParams, generate_dataset, random_problems
from .tuning import DEFAULT_GRIDS, grid_search_cv

DEFAULT_SEED = 42
ENV_PREFIX = "CCSDPERF_"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- resolution

def _read_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


class Options:
    """Resolves each option through flag → environment → config file → default."""

    def __init__(self, args: argparse.Namespace, environ: dict[str, str]):
        self.args = args
        self.environ = environ
        cfg_path = args.config or environ.get(ENV_PREFIX + "CONFIG")
        self.file = _read_config(cfg_path)

    def get(self, name: str, default: Any = None, conv: Callable[[str], Any] = str) -> Any:
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        raw = self.environ.get(ENV_PREFIX + name.upper())
        if raw is None:
            raw = self.file.get(name)
        if raw is None:
            return default
        try:
            return conv(raw)
        except ValueError as exc:
            raise UsageError(f"bad value {raw!r} for {name}: {exc}") from None

    def require(self, name: str, conv: Callable[[str], Any] = str) -> Any:
        value = self.get(name, None, conv)
        if value is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")
        return value


def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def _literal(text: str) -> Any:
    t = text.strip()
    low = t.lower()
    if low in ("none", "null"):
        return None
    if low in ("true", "false"):
        return low == "true"
    for conv in (int, float):
        try:
            return conv(t)
        except ValueError:
            pass
    return t


def _params(pairs: Sequence[str] | None) -> dict[str, Any]:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = _literal(v)
    return out


def _grid(opts: Options, fallback: ConfigGrid = DEFAULT_GRID) -> ConfigGrid:
    nodes = opts.get("nodes", None, _int_list)
    tiles = opts.get("tiles", None, _int_list)
    if nodes is None and tiles is None:
        return fallback
    return ConfigGrid(nodes or fallback.node_candidates, tiles or fallback.tile_candidates)


def _cost_params(opts: Options) -> CostModelParams:
    d = DEFAULT_PARAMS
    return CostModelParams(
        c_flop=opts.get("c_flop", d.c_flop, float),
        t0=opts.get("t0", d.t0, float),
        t1=opts.get("t1", d.t1, float),
        c_comm=opts.get("c_comm", d.c_comm, float),
        c_fixed=opts.get("c_fixed", d.c_fixed, float),
        noise_sigma=opts.get("noise", d.noise_sigma, float),
    )


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


class _Output:
    """Context manager yielding stdout or a file opened for writing."""

    def __init__(self, path: str | None):
        self.path = path

    def __enter__(self):
        if self.path in (None, "-"):
            return sys.stdout
        self.fh = open(self.path, "w", newline="", encoding="utf-8")
        return self.fh

    def __exit__(self, *exc):
        if self.path not in (None, "-"):
            self.fh.close()


def _report_row(r: EvalReport | None) -> list[str]:
    if r is None:
        return ["", "", "", ""]
    return [repr(r.r2), repr(r.mae), repr(r.mape), str(r.n)]


def _safe_evaluate(y, y_hat) -> EvalReport:
    # R² is undefined on a constant group; report NaN there instead of failing
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    try:
        return evaluate(y, y_hat)
    except ValueError:
        err = np.abs(y - y_hat)
        return EvalReport(float("nan"), float(err.mean()), float(np.mean(err / np.abs(y))), len(y))


# ---------------------------------------------------------------- commands

def cmd_generate(opts: Options) -> int:
    seed = opts.get("seed", DEFAULT_SEED, int)
    source = opts.get("problems", "table3")
    if source == "table3":
        problems = list(TABLE3_PROBLEMS)
    elif source == "random":
        problems = random_problems(opts.get("n_problems", 20, int), seed)
    else:
        raise UsageError("--problems must be table3 or random")
    ds = generate_dataset(problems, _grid(opts), opts.get("n_per_cell", 1, int),
                          _cost_params(opts), seed)
    out = opts.get("out", None)
    if out in (None, "-"):
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["O", "V", "nodes", "tile_size", "runtime_s"])
        for r in ds:
            w.writerow([r.o, r.v, r.nodes, r.tile_size, format_runtime(r.runtime_s)])
    else:
        save_csv(ds, out)
    _say(f"generated {len(ds)} records ({len(problems)} problems, seed {seed})")
    return 0


def _spec(opts: Options, family: str) -> ModelSpec:
    return ModelSpec(family, _params(opts.args.param), opts.get("seed", DEFAULT_SEED, int))


def cmd_train(opts: Options) -> int:
    ds = load_csv(opts.require("data"))
    ds.require_fittable()
    family = opts.get("family", "gradient_boosting")
    if family == "lookup":
        model = LookupModel.from_dataset(ds)
    else:
        model = fit(_spec(opts, family), ds.X, ds.y, n_jobs=opts.get("jobs", 1, int))
    model.dump(opts.require("out"))
    report = _safe_evaluate(ds.y, model.predict(ds.X))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["r2", "mae", "mape", "n"])
    w.writerow(_report_row(report))
    _say(f"trained {family} on {len(ds)} records; training-set {report}")
    return 0


def cmd_eval(opts: Options) -> int:
    model = load_model(opts.require("model"))
    ds = load_csv(opts.require("data"))
    pred = model.predict(ds.X)
    rows = [["all", "all", *_report_row(_safe_evaluate(ds.y, pred))]]
    for (o, v), idx in sorted(group_by_problem(ds).items()):
        rows.append([str(o), str(v), *_report_row(_safe_evaluate(ds.y[idx], pred[idx]))])
    goal = opts.get("goal", None)
    with _Output(opts.get("out", None)) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["O", "V", "r2", "mae", "mape", "n"])
        w.writerows(rows)
    _say(f"overall: R2={rows[0][2]} MAE={rows[0][3]} MAPE={rows[0][4]} (n={rows[0][5]})")
    if goal is not None:
        goal = Goal.parse(goal)
        true_opt = get_optimal_values(ds, goal=goal)
        pred_opt = get_optimal_values(ds.X, pred, goal)
        cfg = evaluate_config_predictions(ds, true_opt, pred_opt, goal)
        _say(f"{goal.value} configuration task: {cfg}")
    return 0


def _parse_grid_spec(text: str) -> dict[str, list]:
    grid = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise UsageError(f"--grid expects key=v1,v2;key2=..., got {part!r}")
        k, vs = part.split("=", 1)
        grid[k.strip()] = [_literal(v) for v in vs.split(",")]
    return grid


def cmd_tune(opts: Options) -> int:
    from .regressors import Family
    ds = load_csv(opts.require("data"))
    ds.require_fittable()
    family = Family.parse(opts.get("family", "gradient_boosting"))
    grid_text = opts.get("grid", None)
    if grid_text:
        grid = _parse_grid_spec(grid_text)
    elif family in DEFAULT_GRIDS:
        grid = DEFAULT_GRIDS[family]
    else:
        raise UsageError(f"no default grid for {family.value}; pass --grid")
    res = grid_search_cv(family, grid, ds.X, ds.y, k=opts.get("k", 5, int),
                         scoring=opts.get("scoring", "r2"), seed=opts.get("seed", DEFAULT_SEED, int),
                         base=_params(opts.args.param), n_jobs=opts.get("jobs", 1, int))
    out = opts.get("out", None)
    if out:
        res.write_csv(out)
    best = opts.get("best_out", None)
    text = json.dumps(res.best_spec.to_dict(), sort_keys=True)
    if best:
        Path(best).write_text(text + "\n", encoding="utf-8")
    print(text)
    _say(f"best mean {res.scoring} = {res.best_score:.6g} over {len(res.cv_table)} grid points")
    return 0


def cmd_recommend(opts: Options) -> int:
    model = load_model(opts.require("model"))
    o, v = opts.require("o", int), opts.require("v", int)
    goal = Goal.parse(opts.get("goal", "stq"))
    grid = _grid(opts)
    swept = sweep(model, (o, v), grid)
    rec = recommend(model, (o, v), grid, goal, swept=swept)
    sweep_out = opts.get("sweep_out", None)
    if sweep_out:
        write_sweep_csv(swept, (o, v), sweep_out)
    print(rec.as_line())
    _say(rec.summary())
    return 0


def _al_config(opts: Options, learner_seed: int) -> ALConfig:
    kwargs: dict[str, Any] = {"strategy": opts.get("strategy", "uncertainty"), "seed": learner_seed}
    for name in ("n_initial", "query_size", "n_queries", "n_committees", "gp_restarts"):
        value = opts.get(name, None, int)
        if value is not None:
            kwargs[name] = value
    goal = opts.get("goal", None)
    if goal is not None:
        kwargs["goal"] = goal
    report = opts.get("committee_report", None)
    if report is not None:
        kwargs["committee_report"] = report
    if opts.get("no_diversify", False, _bool):
        kwargs["diversify_committee"] = False
    family = opts.get("family", None)
    if family is not None or opts.args.param:
        base = ModelSpec(family or ("gaussian_process" if kwargs["strategy"] in ("uncertainty", "us")
                                    else "gradient_boosting"))
        kwargs["model_spec"] = ModelSpec(base.family, _params(opts.args.param), learner_seed)
    return ALConfig(**kwargs)


def _pool_dataset(opts: Options, seed: int) -> Dataset:
    path = opts.get("pool", None)
    if path:
        return load_csv(path)
    problems = random_problems(opts.get("n_problems", 18, int), seed)
    return generate_dataset(problems, _grid(opts, ACTIVE_GRID), 1, _cost_params(opts), seed)


# Candidate grid for synthetic active-learning pools: 20 node counts × 5 tiles.
ACTIVE_GRID = ConfigGrid((2, 4, 5, 8, 10, 16, 20, 32, 40, 64, 80, 120, 160, 240, 320, 400, 480,
                          640, 800, 900), (40, 60, 80, 120, 160))


def cmd_active_sim(opts: Options) -> int:
    seed = opts.get("seed", DEFAULT_SEED, int)
    pool = _pool_dataset(opts, seed)
    test_path = opts.get("test", None)
    test = load_csv(test_path) if test_path else None
    cfg = _al_config(opts, seed)
    oracle_kind = opts.get("oracle", "pool")
    if oracle_kind == "pool":
        oracle = PoolOracle(pool.y)
    elif oracle_kind == "synthetic":
        oracle = SyntheticOracle(_cost_params(opts), seed)
    else:
        raise UsageError("--oracle must be pool or synthetic")
    res = run_active_learning(pool, test, oracle, cfg, n_jobs=opts.get("jobs", 1, int))
    with _Output(opts.get("out", None)) as fh:
        write_curve_csv(res.curve, fh)
    last = res.curve[-1]
    _say(f"{cfg.strategy.value}: {len(res.curve)} points, final n_labeled={last.n_labeled}, "
         f"pool {last.pool_report}")
    return 0


def _candidate_rows(path: str) -> tuple[np.ndarray, np.ndarray | None]:
    """Candidate pool from CSV: features required, runtime_s column optional."""
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    if header is None:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in header]
    if header == ["O", "V", "nodes", "tile_size", "runtime_s"]:
        ds = load_csv(path)
        return ds.X, ds.y
    if header != ["O", "V", "nodes", "tile_size"]:
        raise DataError(f"{path}: header must be O,V,nodes,tile_size[,runtime_s]")
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            try:
                vals = [int(c) for c in row]
            except ValueError:
                raise DataError(f"row {lineno}: expected integers, got {row}") from None
            if len(vals) != 4 or min(vals) < 1:
                raise DataError(f"row {lineno}: expected 4 integers ≥ 1, got {row}")
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no candidate rows")
    return np.asarray(rows, dtype=float), None


def cmd_active_suggest(opts: Options) -> int:
    ckpt = Path(opts.require("checkpoint"))
    pending_path = opts.require("pending")
    jobs = opts.get("jobs", 1, int)
    if ckpt.exists():
        learner = ActiveLearner.load(ckpt, n_jobs=jobs)
        if learner.pending:
            raise DataError(f"{len(learner.pending)} suggested experiments still await ingestion")
        if learner.finished:
            _say("the loop has finished; nothing to suggest")
            return 0
        point, batch = learner.step()
        _say(f"iteration {point.iteration}: model fit on {point.n_labeled} labeled rows"
             + (f", pool {point.pool_report}" if point.pool_report else ""))
        if len(batch) == 0:
            write_pending(pending_path, np.empty((0, 4)))
            learner.save(ckpt)
            _say("budget spent or pool exhausted; loop finished")
            return 0
    else:
        seed = opts.get("seed", DEFAULT_SEED, int)
        X, y = _candidate_rows(opts.require("pool"))
        test_path = opts.get("test", None)
        learner = ActiveLearner(X, _al_config(opts, seed), y,
                                load_csv(test_path) if test_path else None, jobs)
        batch = learner.initial_batch()
    write_pending(pending_path, learner.pool_X[batch])
    learner.save(ckpt)
    _say(f"{len(batch)} experiments written to {pending_path}")
    return 0


def cmd_active_ingest(opts: Options) -> int:
    ckpt = Path(opts.require("checkpoint"))
    learner = ActiveLearner.load(ckpt, n_jobs=opts.get("jobs", 1, int))
    labeled = load_csv(opts.require("labels"))
    if not learner.pending:
        raise DataError("no suggested experiments are pending")
    free = {}
    for i in learner.pending:
        free.setdefault(tuple(int(x) for x in learner.pool_X[i]), []).append(i)
    indices = []
    for lineno, rec in enumerate(labeled.records, 2):
        slots = free.get(rec.features)
        if not slots:
            raise DataError(f"row {lineno} ({','.join(map(str, rec.features))}) "
                            "is not among the pending suggestions")
        indices.append(slots.pop(0))
    missing = [k for k, v in free.items() if v]
    if missing:
        raise DataError(f"missing labels for pending rows: {missing[:5]}")
    learner.add_labels(indices, labeled.y)
    learner.save(ckpt)
    pending_path = opts.get("pending", None)
    if pending_path:
        write_pending(pending_path, np.empty((0, 4)))
    _say(f"ingested {len(indices)} labels; {len(learner.labeled)} labeled in total")
    return 0


def cmd_curve_export(opts: Options) -> int:
    items = list(opts.args.curves or [])
    if not items:
        raise UsageError("give at least one curve as NAME=PATH or PATH")
    tables = []
    for item in items:
        name, _, path = item.rpartition("=") if "=" in item else (Path(item).stem, "", item)
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or header[:2] != ["iteration", "n_labeled"]:
                raise DataError(f"{path}: not a learning-curve CSV")
            tables.append((name, header, [row for row in reader if row]))
    columns = max((t[1] for t in tables), key=len)
    with _Output(opts.get("out", None)) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["curve", *columns])
        for name, header, rows in tables:
            for row in rows:
                record = dict(zip(header, row))
                w.writerow([name, *(record.get(c, "") for c in columns)])
    return 0


# ---------------------------------------------------------------- parser

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help=f"random seed (default {DEFAULT_SEED})")
    p.add_argument("--jobs", type=int, help="worker threads (default 1)")
    p.add_argument("--config", help="key = value file of option defaults")


def _add_grid(p):
    p.add_argument("--nodes", type=_int_list, help="comma-separated node candidates")
    p.add_argument("--tiles", type=_int_list, help="comma-separated tile candidates")


def _add_cost(p):
    p.add_argument("--c-flop", type=float)
    p.add_argument("--t0", type=float)
    p.add_argument("--t1", type=float)
    p.add_argument("--c-comm", type=float)
    p.add_argument("--c-fixed", type=float)
    p.add_argument("--noise", type=float, help="lognormal sigma (default 0.03)")


def _add_model(p, family_help="model family (default gradient_boosting)"):
    p.add_argument("--family", help=family_help)
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="hyperparameter override; repeatable")


def _add_al(p):
    p.add_argument("--strategy", help="random, uncertainty or committee (default uncertainty)")
    p.add_argument("--n-initial", type=int)
    p.add_argument("--query-size", type=int)
    p.add_argument("--n-queries", type=int)
    p.add_argument("--n-committees", type=int)
    p.add_argument("--gp-restarts", type=int)
    p.add_argument("--goal", help="score the stq or bq configuration task on --test")
    p.add_argument("--committee-report", help="last (default) or mean")
    p.add_argument("--no-diversify", action="store_const", const=True,
                   help="fit committee members on identical data")
    p.add_argument("--test", help="labeled CSV for configuration-task scoring")
    _add_model(p, "override the strategy's model family")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ccsdperf", description="Runtime prediction and configuration advice "
                     "for tiled distributed tensor-contraction workloads.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("generate", help="write a synthetic dataset CSV")
    _add_common(p)
    p.add_argument("--out", help="output CSV (default stdout)")
    p.add_argument("--problems", choices=["table3", "random"], help="problem list (default table3)")
    p.add_argument("--n-problems", type=int, help="count for --problems random (default 20)")
    p.add_argument("--n-per-cell", type=int, help="records per problem × cell (default 1)")
    _add_grid(p)
    _add_cost(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="fit a model and dump it as JSON")
    _add_common(p)
    p.add_argument("--data", help="training CSV")
    p.add_argument("--out", help="model JSON path")
    _add_model(p, "model family, or lookup for an exact table (default gradient_boosting)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a model on a CSV, overall and per (O, V)")
    _add_common(p)
    p.add_argument("--model")
    p.add_argument("--data")
    p.add_argument("--out", help="metrics CSV (default stdout)")
    p.add_argument("--goal", help="also score the stq or bq configuration task")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tune", help="k-fold grid search")
    _add_common(p)
    p.add_argument("--data")
    _add_model(p)
    p.add_argument("--grid", help="e.g. 'n_estimators=250,500;max_depth=5,10'")
    p.add_argument("--k", type=int, help="folds (default 5)")
    p.add_argument("--scoring", choices=["r2", "mae", "mape"], help="default r2")
    p.add_argument("--out", help="cv table CSV")
    p.add_argument("--best-out", help="best spec JSON")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("recommend", help="answer stq or bq for one problem size")
    _add_common(p)
    p.add_argument("--model")
    p.add_argument("--o", type=int)
    p.add_argument("--v", type=int)
    p.add_argument("--goal", help="stq (default) or bq")
    p.add_argument("--sweep-out", help="CSV of the full predicted sweep")
    _add_grid(p)
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("active-sim", help="simulate an active-learning run")
    _add_common(p)
    p.add_argument("--pool", help="labeled pool CSV (default: synthetic pool)")
    p.add_argument("--n-problems", type=int, help="problems in the synthetic pool (default 18)")
    p.add_argument("--oracle", choices=["pool", "synthetic"], help="default pool")
    p.add_argument("--out", help="learning-curve CSV (default stdout)")
    _add_al(p)
    _add_grid(p)
    _add_cost(p)
    p.set_defaults(func=cmd_active_sim)

    p = sub.add_parser("active-suggest", help="write the next batch of experiments to run")
    _add_common(p)
    p.add_argument("--checkpoint", help="loop state JSON (created on first use)")
    p.add_argument("--pending", help="pending-experiments CSV to write")
    p.add_argument("--pool", help="candidate CSV (first use only)")
    _add_al(p)
    p.set_defaults(func=cmd_active_suggest)

    p = sub.add_parser("active-ingest", help="feed measured runtimes back into the loop")
    _add_common(p)
    p.add_argument("--checkpoint")
    p.add_argument("--labels", help="CSV of the pending rows with runtime_s filled in")
    p.add_argument("--pending", help="pending CSV to clear after ingestion")
    p.set_defaults(func=cmd_active_ingest)

    p = sub.add_parser("curve-export", help="merge learning curves into one CSV")
    _add_common(p)
    p.add_argument("curves", nargs="*", metavar="NAME=PATH")
    p.add_argument("--out", help="merged CSV (default stdout)")
    p.set_defaults(func=cmd_curve_export)
    return parser


def run(argv: Sequence[str] | None = None, environ: dict[str, str] | None = None) -> int:
    environ = dict(os.environ if environ is None else environ)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(Options(args, environ))
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (UsageError, DataError, ValueError, KeyError, FileNotFoundError) as exc:
        _say(f"error: {exc}")
        return 1
    except LabelsPending as exc:
        _say(str(exc))
        return 0
    except Exception as exc:  # noqa: BLE001
        _say(f"runtime failure: {type(exc).__name__}: {exc}")
        return 2


def main() -> None:
    sys.exit(run())


__all__ = ["build_parser", "main", "run"]
