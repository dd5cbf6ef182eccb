import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccsdperf.advisor import (
    ConfigGrid,
    Goal,
    LookupModel,
    OptimalEntry,
    config_loss_pairs,
    evaluate_config_predictions,
    get_optimal_values,
    node_hours,
    recommend,
    sweep,
)
from ccsdperf.data import Dataset, RunRecord
from ccsdperf.regressors import ModelSpec, fit, load_model
from ccsdperf.synth import DEFAULT_PARAMS, generate_dataset, true_runtime
from tables import BQ_ROWS, STQ_ROWS, bq_fixture, dataset, stq_fixture


class Constant:
    def __init__(self, c):
        self.c = c

    def predict(self, X):
        return np.full(len(np.atleast_2d(X)), self.c)


class Oracle:
    def predict(self, X):
        X = np.atleast_2d(X)
        return true_runtime(X[:, 0], X[:, 1], X[:, 2], X[:, 3], DEFAULT_PARAMS)


def test_node_hours_examples():
    assert node_hours(5, 17.41) == pytest.approx(0.02418, abs=1e-5)
    assert node_hours(5, 17.41) == 5 * 17.41 / 3600
    assert node_hours(200, 616.39) == pytest.approx(34.2439, abs=1e-4)
    assert node_hours(1, 3600) == 1.0
    for nodes, runtime in ((0, 1.0), (1, 0.0), (1, -3.0)):
        with pytest.raises(ValueError):
            node_hours(nodes, runtime)


def test_node_hours_reproduce_budget_table():
    for o, v, nodes, tile, runtime, nh in BQ_ROWS:
        assert abs(round(node_hours(nodes, runtime), 2) - nh) <= 0.005, (o, v)


def test_stq_table_optima():
    table = get_optimal_values(stq_fixture(), goal="stq")
    assert len(table) == 22
    for o, v, nodes, tile, runtime in STQ_ROWS:
        assert table[(o, v)] == OptimalEntry(nodes, tile, runtime, runtime)


def test_bq_table_optima():
    table = get_optimal_values(bq_fixture(), goal="bq")
    assert (table[(81, 835)].nodes, table[(81, 835)].tile_size) == (25, 80)
    assert round(table[(81, 835)].objective, 2) == 1.34
    for o, v, nodes, tile, runtime, _ in BQ_ROWS:
        assert (table[(o, v)].nodes, table[(o, v)].tile_size) == (nodes, tile)


def test_optimal_ties_and_singleton():
    ds = dataset([(1, 1, 20, 80, 5.0), (1, 1, 10, 90, 5.0), (1, 1, 10, 60, 5.0), (2, 2, 4, 4, 3.0)])
    table = get_optimal_values(ds, goal="stq")
    assert (table[(1, 1)].nodes, table[(1, 1)].tile_size) == (10, 60)
    assert table[(2, 2)] == OptimalEntry(4, 4, 3.0, 3.0)


def test_optimal_table_idempotent():
    ds = stq_fixture()
    table = get_optimal_values(ds)
    best = dataset([(o, v, e.nodes, e.tile_size, e.runtime_s) for (o, v), e in table.items()])
    assert get_optimal_values(best) == table


def test_config_loss_uses_true_value_at_predicted_config():
    ds = stq_fixture()
    true = get_optimal_values(ds)
    predicted = dict(true)
    # the model picked (220, 60) for (116, 575) and believed it would take 30 s
    predicted[(116, 575)] = OptimalEntry(220, 60, 30.0, 30.0)
    pairs = {p.problem: p for p in config_loss_pairs(ds, true, predicted)}
    pair = pairs[(116, 575)]
    assert (pair.true_objective, pair.achieved_objective) == (38.35, 38.78)
    assert pair.achieved_objective - pair.true_objective == pytest.approx(0.43)
    assert pair.achieved_objective != 30.0
    rep = evaluate_config_predictions(ds, true, predicted)
    assert rep.mae == pytest.approx(0.43 / 22)


def test_config_loss_two_groups():
    ds = dataset([(1, 1, 1, 1, 10.0), (1, 1, 2, 1, 11.0), (2, 2, 1, 1, 20.0), (2, 2, 2, 1, 25.0)])
    true = get_optimal_values(ds)
    predicted = {(1, 1): OptimalEntry(2, 1, 0, 0), (2, 2): OptimalEntry(1, 1, 0, 0)}
    rep = evaluate_config_predictions(ds, true, predicted)
    assert rep.mae == pytest.approx(0.5)
    assert rep.mape == pytest.approx(0.05)
    assert evaluate_config_predictions(ds, true, true).mape == 0.0


def test_config_loss_errors():
    ds = stq_fixture()
    true = get_optimal_values(ds)
    missing = dict(true)
    missing[(44, 260)] = OptimalEntry(999, 40, 1.0, 1.0)
    with pytest.raises(KeyError):
        evaluate_config_predictions(ds, true, missing)
    partial = dict(true)
    partial.pop((44, 260))
    with pytest.raises(ValueError):
        evaluate_config_predictions(ds, true, partial)


def test_sweep_order_and_size():
    grid = ConfigGrid((5, 10, 20), (40, 60, 80, 120))
    swept = sweep(Oracle(), (100, 500), grid)
    assert [(n, t) for n, t, _ in swept] == grid.cells()
    single = sweep(Oracle(), (100, 500), ConfigGrid((5,), (40,)))
    assert single == [(5, 40, true_runtime(100, 500, 5, 40))]


def test_lookup_reproduces_table_row(tmp_path):
    lookup = LookupModel.from_dataset(stq_fixture())
    grid = ConfigGrid(tuple(sorted({r[2] for r in STQ_ROWS})), tuple(sorted({r[3] for r in STQ_ROWS})))
    rec = recommend(lookup, (44, 260), grid, "stq")
    assert (rec.nodes, rec.tile_size, rec.predicted_runtime_s) == (5, 40, 17.41)
    assert rec.as_line() == "44,260,stq,5,40,17.41,0.0242"
    lookup.dump(tmp_path / "lk.json")
    assert load_model(tmp_path / "lk.json").table == lookup.table


def test_constant_model_bq_picks_fewest_nodes():
    grid = ConfigGrid((5, 10, 20), (60, 100))
    rec = recommend(Constant(100.0), (10, 10), grid, Goal.BQ)
    assert (rec.nodes, rec.tile_size) == (5, 60)
    assert rec.predicted_node_hours == pytest.approx(5 * 100.0 / 3600, abs=1e-12)


def test_oracle_recommendation_is_grid_argmin():
    grid = ConfigGrid((5, 10, 20, 40, 80, 160, 320, 640), (40, 60, 67, 80, 120))
    for o, v in ((44, 260), (146, 278), (116, 575)):
        for goal in Goal:
            rec = recommend(Oracle(), (o, v), grid, goal)
            objs = {(n, t): true_runtime(o, v, n, t) * (1 if goal == Goal.STQ else n / 3600)
                    for n, t in grid.cells()}
            assert (rec.nodes, rec.tile_size) == min(objs, key=objs.get)


def test_oracle_sweep_nodes_shape():
    nodes = tuple(range(1, 400, 7))
    swept = sweep(Oracle(), (44, 260), ConfigGrid(nodes, (67,)))
    t = np.array([r for _, _, r in swept])
    k = int(np.argmin(t))
    assert np.all(np.diff(t[: k + 1]) <= 0) and np.all(np.diff(t[k:]) >= 0)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([np.log, np.sqrt, lambda x: 3 * x + 7, lambda x: x**3]))
def test_stq_argmin_invariant_under_monotone_transform(f):
    class Transformed:
        def predict(self, X):
            return f(Oracle().predict(X))
    grid = ConfigGrid((5, 10, 20, 40, 80), (40, 67, 120))
    a = recommend(Oracle(), (99, 718), grid)
    b = recommend(Transformed(), (99, 718), grid)
    assert (a.nodes, a.tile_size) == (b.nodes, b.tile_size)


def test_recommendation_invariants_with_trained_model():
    grid = ConfigGrid((5, 10, 20, 40, 80, 160), (40, 80, 120))
    ds = generate_dataset([(44, 260), (81, 835), (146, 278)], grid, seed=1)
    m = fit(ModelSpec("gb", {"n_estimators": 50, "max_depth": 4}), ds.X, ds.y)
    for goal in Goal:
        rec = recommend(m, (81, 835), grid, goal)
        assert (rec.nodes, rec.tile_size) in grid.cells()
        assert rec.predicted_node_hours == pytest.approx(rec.nodes * rec.predicted_runtime_s / 3600, abs=1e-9)


def test_recommend_rejects_unusable_predictions():
    with pytest.raises(ValueError):
        recommend(Constant(np.inf), (1, 1), ConfigGrid((1,), (1,)))
    with pytest.raises(ValueError):
        Goal.parse("fastest")
