import pytest
from pandas.testing import assert_frame_equal

from fiscal_tiebout.rdd.montecarlo import planted_truth, run_monte_carlo
from fiscal_tiebout.rdd.panel import PanelParams

SMALL = PanelParams(n_munis=200, n_years=8, propensity=0.5, kappa=0.05, effect_duration=2)


def test_small_run_is_reproducible():
    first = run_monte_carlo(SMALL, 3, seed=1, lag=1, estimators=("sharp", "fuzzy"), workers=1)
    second = run_monte_carlo(SMALL, 3, seed=1, lag=1, estimators=("sharp", "fuzzy"), workers=1)
    assert_frame_equal(first.replications, second.replications)
    assert len(first.replications) == 6
    assert set(first.summary["estimator"]) == {"sharp", "fuzzy"}
    assert first.stat("sharp", "truth") == pytest.approx(0.05)
    assert 0.0 <= first.stat("sharp", "coverage") <= 1.0


def test_replications_use_distinct_seeds():
    report = run_monte_carlo(SMALL, 2, seed=1, lag=1, estimators=("sharp",), workers=1)
    estimates = report.replications["estimate"].tolist()
    assert estimates[0] != estimates[1]


def test_planted_truth():
    assert planted_truth(SMALL, "sharp", 1) == pytest.approx(0.05)
    assert planted_truth(SMALL, "local_linear", 5) == pytest.approx(0.10)
    assert planted_truth(SMALL, "sharp", 0) == 0.0
    assert planted_truth(SMALL, "fuzzy", 3) == SMALL.beta1


def test_unknown_estimator():
    with pytest.raises(ValueError):
        run_monte_carlo(SMALL, 1, estimators=("ols",))
