import io
import math

import numpy as np
import pytest

from ccsdperf.active import (
    ALConfig,
    ActiveLearner,
    DeferredOracle,
    LabelsPending,
    PoolOracle,
    Strategy,
    SyntheticOracle,
    read_pending,
    run_active_learning,
    select_committee,
    select_random,
    select_uncertainty,
    write_curve_csv,
)
from ccsdperf.data import ConfigGrid, Dataset
from ccsdperf.regressors import GaussianProcessRegressor, ModelSpec, fit
from ccsdperf.synth import generate_dataset, random_problems, true_runtime

GRID = ConfigGrid((5, 10, 20, 40, 80, 160, 320), (40, 80, 120))
FAST_GB = ModelSpec("gb", {"n_estimators": 20, "max_depth": 4, "log_target": True})
FAST_GP = ModelSpec("gp", {"n_restarts": 1, "log_target": True, "log_features": True})


def pool(n_problems=5, seed=0):
    return generate_dataset(random_problems(n_problems, seed), GRID, seed=seed)


class GPWrap:
    def __init__(self, gp):
        self.gp = gp

    def predict_with_std(self, X):
        return self.gp.predict_with_std(X)


def test_select_committee_examples():
    assert select_committee([[0, 0], [1, 3]], 1).tolist() == [1]
    assert select_committee(np.ones((5, 3)), 3).tolist() == [0, 1, 2]
    assert sorted(select_committee([[0, 1], [2, 2]], 10).tolist()) == [0, 1]
    with pytest.raises(ValueError):
        select_committee([[1.0], [2.0]], 1)


def test_select_random():
    assert sorted(select_random(4, 10, seed=1).tolist()) == [0, 1, 2, 3]
    assert select_random(50, 5, seed=2).tolist() == select_random(50, 5, seed=2).tolist()
    rng = np.random.default_rng(0)
    counts = np.bincount([select_random(10, 1, rng)[0] for _ in range(10000)], minlength=10)
    assert counts.min() >= 800 and counts.max() <= 1200
    with pytest.raises(ValueError):
        select_random(5, 0)


def test_select_uncertainty_far_point():
    gp = GaussianProcessRegressor(1.0, 1.0, 0.0, optimize=False, normalize_y=False).fit([[0.0]], [1.0])
    assert select_uncertainty(GPWrap(gp), [[0.0], [50.0]], 1).tolist() == [1]
    assert sorted(select_uncertainty(GPWrap(gp), [[0.0], [50.0]], 2).tolist()) == [0, 1]


def test_select_uncertainty_matches_2x2_posterior():
    gp = GaussianProcessRegressor(1.0, 1.0, 0.0, optimize=False, normalize_y=False)
    gp.fit([[0.0], [1.0]], [0.0, 1.0])
    Q = [[0.5], [1.3], [-0.8]]
    k = lambda a, b: math.exp(-0.5 * (a - b) ** 2)
    e = k(0, 1)
    inv = np.array([[1, -e], [-e, 1]]) / (1 - e * e)
    stds = []
    for (q,) in Q:
        ks = np.array([k(q, 0), k(q, 1)])
        stds.append(math.sqrt(1 - ks @ inv @ ks))
    expected = sorted(range(3), key=lambda i: -stds[i])
    assert select_uncertainty(GPWrap(gp), Q, 3).tolist() == expected


def test_unsupported_model_for_uncertainty():
    ds = pool(2)
    m = fit(FAST_GB, ds.X, ds.y)
    with pytest.raises(TypeError):
        select_uncertainty(m, ds.X, 2)


def test_config_validation():
    assert ALConfig(strategy="qc").n_queries == 10
    assert ALConfig(strategy="us").n_queries == 20
    for bad in ({"n_initial": 0}, {"query_size": 0}, {"n_queries": 0},
                {"strategy": "qc", "n_committees": 1}, {"strategy": "magic"}):
        with pytest.raises(ValueError):
            ALConfig(**bad)


def test_exhaustion_in_one_iteration():
    ds = pool(4)  # 84 rows
    cfg = ALConfig("random", n_initial=30, query_size=100, model_spec=FAST_GB, seed=1)
    res = run_active_learning(ds, cfg=cfg)
    assert [p.n_labeled for p in res.curve] == [30, len(ds)]
    assert sorted(res.labeled_indices) == list(range(len(ds)))


@pytest.mark.parametrize("strategy", ["random", "committee", "uncertainty"])
def test_bookkeeping(strategy):
    ds = pool(4)
    spec = FAST_GP if strategy == "uncertainty" else FAST_GB
    cfg = ALConfig(strategy, n_initial=10, query_size=7, n_queries=4, n_committees=3,
                   model_spec=spec, seed=3)
    learner = ActiveLearner(ds.X, cfg, ds.y)
    oracle = PoolOracle(ds.y)
    batch = learner.initial_batch()
    seen = set()
    while True:
        assert set(batch.tolist()) <= set(learner.unlabeled.tolist()) | set(learner.pending)
        assert not seen & set(batch.tolist())
        seen |= set(batch.tolist())
        learner.add_labels(batch, oracle.query(batch, ds.X[batch]))
        labeled, unlabeled = set(learner.labeled), set(learner.unlabeled.tolist())
        assert not labeled & unlabeled and labeled | unlabeled == set(range(len(ds)))
        np.testing.assert_array_equal(learner.labels[learner.labeled], ds.y[learner.labeled])
        _, batch = learner.step()
        if len(batch) == 0:
            break
    assert [p.n_labeled for p in learner.curve] == [10 + 7 * i for i in range(5)]
    assert [p.iteration for p in learner.curve] == list(range(5))


def test_degenerate_committee_selects_in_index_order():
    ds = pool(3)
    cfg = ALConfig("committee", n_initial=10, query_size=5, n_queries=1, model_spec=FAST_GB,
                   diversify_committee=False, seed=0)
    learner = ActiveLearner(ds.X, cfg, ds.y)
    b = learner.initial_batch()
    learner.add_labels(b, ds.y[b])
    _, batch = learner.step()
    assert batch.tolist() == learner.unlabeled[:5].tolist() if False else batch.tolist() == sorted(
        set(range(len(ds))) - set(b.tolist()))[:5]


def test_full_budget_equivalence():
    ds = pool(2)  # 42 rows
    cfg = ALConfig("uncertainty", n_initial=12, query_size=10, model_spec=FAST_GP, seed=5)
    res = run_active_learning(ds, cfg=cfg)
    assert res.curve[-1].n_labeled == len(ds)
    direct = fit(cfg.spec, ds.X, ds.y)
    Q = generate_dataset([(100, 500)], GRID).X
    np.testing.assert_array_equal(res.learner.final_model().predict(Q), direct.predict(Q))


def test_goal_scoring_and_requirements():
    ds = pool(4)
    test = pool(3, seed=9)
    cfg = ALConfig("random", n_initial=20, query_size=10, n_queries=2, goal="bq",
                   model_spec=FAST_GB, seed=0)
    res = run_active_learning(ds, test, cfg=cfg)
    assert all(p.config_report is not None and p.config_report.n == 3 for p in res.curve)
    with pytest.raises(ValueError):
        run_active_learning(ds, None, cfg=cfg)
    with pytest.raises(ValueError):
        run_active_learning(ds.subset(range(5)), cfg=ALConfig("random", n_initial=10))


def test_learning_occurs_with_uncertainty_defaults():
    ds = generate_dataset(random_problems(20, 123), ConfigGrid(
        (5, 10, 20, 40, 80, 160, 320, 480, 640, 900), (40, 60, 80, 120, 160)), 2, seed=123)
    assert len(ds) == 2000
    res = run_active_learning(ds, cfg=ALConfig("uncertainty", seed=0))
    assert [p.n_labeled for p in res.curve] == [50 + 50 * i for i in range(21)]
    assert res.curve[-1].pool_report.mape < res.curve[0].pool_report.mape


def test_checkpoint_resume_is_identical(tmp_path):
    ds = pool(4)
    cfg = ALConfig("committee", n_initial=10, query_size=6, n_queries=3, n_committees=3,
                   model_spec=FAST_GB, seed=2)
    straight = run_active_learning(ds, cfg=cfg)
    learner = ActiveLearner(ds.X, cfg, ds.y)
    b = learner.initial_batch()
    learner.add_labels(b, ds.y[b])
    _, b = learner.step()
    learner.save(tmp_path / "ck.json")
    resumed = ActiveLearner.load(tmp_path / "ck.json")
    assert resumed.pending == [int(i) for i in b]
    while True:
        resumed.add_labels(b, ds.y[b])
        _, b = resumed.step()
        if len(b) == 0:
            break
    assert resumed.labeled == straight.learner.labeled
    assert [p.pool_report for p in resumed.curve] == [p.pool_report for p in straight.curve]


def test_deferred_oracle_never_invents_labels(tmp_path):
    ds = pool(3)
    pending = tmp_path / "pending.csv"
    cfg = ALConfig("random", n_initial=5, model_spec=FAST_GB)
    with pytest.raises(LabelsPending):
        run_active_learning(ds, oracle=DeferredOracle(pending), cfg=cfg)
    rows = read_pending(pending)
    assert len(rows) == 5 and all(tuple(map(float, r)) in {tuple(x) for x in ds.X} for r in rows)


def test_add_labels_rejects_mismatch():
    ds = pool(2)
    learner = ActiveLearner(ds.X, ALConfig("random", n_initial=5, model_spec=FAST_GB), ds.y)
    b = learner.initial_batch()
    with pytest.raises(ValueError):
        learner.add_labels(b[:4], ds.y[b[:4]])
    with pytest.raises(ValueError):
        learner.add_labels(b, -ds.y[b])
    with pytest.raises(RuntimeError):
        learner.step()


def test_oracles():
    ds = pool(2)
    idx = np.array([3, 0, 7])
    np.testing.assert_array_equal(PoolOracle(ds.y).query(idx, ds.X[idx]), ds.y[idx])
    syn = SyntheticOracle(seed=4)
    a = syn.query(idx, ds.X[idx])
    assert np.array_equal(a, syn.query(idx, ds.X[idx]))
    truth = true_runtime(*ds.X[idx].T)
    assert np.all(np.abs(np.log(a / truth)) < 0.2)


def test_curve_csv():
    ds = pool(3)
    res = run_active_learning(ds, pool(2, seed=5), cfg=ALConfig(
        "random", n_initial=10, query_size=10, n_queries=1, goal="stq", model_spec=FAST_GB))
    buf = io.StringIO()
    write_curve_csv(res.curve, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "iteration,n_labeled,r2,mae,mape,r2_cfg,mae_cfg,mape_cfg"
    assert [l.split(",")[:2] for l in lines[1:]] == [["0", "10"], ["1", "20"]]
    assert Strategy.parse("qc") is Strategy.COMMITTEE
