import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccsdperf.metrics import EvalReport, evaluate, mae, mape, r2_score


def test_hand_computed_triple():
    y, yh = [1, 2, 4], [2, 2, 2]
    assert r2_score(y, yh) == pytest.approx(-1 / 14, abs=1e-15)
    assert mae(y, yh) == pytest.approx(1.0)
    assert mape(y, yh) == pytest.approx(0.5)
    r = evaluate(y, yh)
    assert (round(r.r2, 4), r.mae, r.mape, r.n) == (-0.0714, 1.0, 0.5, 3)


def test_perfect_and_mean_predictors():
    y = np.array([3.0, 5.0, 10.0])
    assert evaluate(y, y) == EvalReport(1.0, 0.0, 0.0, 3)
    assert r2_score(y, np.full(3, y.mean())) == pytest.approx(0.0, abs=1e-15)


def test_single_terms():
    assert mae([100], [90]) == 10
    assert mape([100], [90]) == pytest.approx(0.10)


def test_errors():
    with pytest.raises(ValueError):
        r2_score([1, 1], [1, 2])
    with pytest.raises(ValueError):
        mape([0, 1], [1, 1])
    with pytest.raises(ValueError):
        mae([1, 2], [1])
    with pytest.raises(ValueError):
        mae([], [])


vec = st.lists(st.floats(0.5, 1e4), min_size=2, max_size=40)


@settings(max_examples=60, deadline=None)
@given(vec, st.floats(-100, 100), st.floats(0.1, 100), st.randoms(use_true_random=False))
def test_invariances(y, c, a, rnd):
    y = np.array(y)
    yh = y * 1.1 + 0.3
    assert mae(y + c, yh + c) == pytest.approx(mae(y, yh), rel=1e-9, abs=1e-9)
    assert mae(a * y, a * yh) == pytest.approx(a * mae(y, yh), rel=1e-9)
    assert mape(a * y, a * yh) == pytest.approx(mape(y, yh), rel=1e-9)
    perm = list(range(len(y)))
    rnd.shuffle(perm)
    assert mae(y[perm], yh[perm]) == pytest.approx(mae(y, yh), rel=1e-12)
    if np.ptp(y) > 0:
        assert r2_score(y, y) == 1.0
        assert r2_score(y[perm], yh[perm]) == pytest.approx(r2_score(y, yh), rel=1e-9, abs=1e-12)
