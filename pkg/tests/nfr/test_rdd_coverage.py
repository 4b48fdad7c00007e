"""
NFR: estimator coverage and size under the planted-effect generator

How to run (opt-in):
    RUN_NFR=1 pytest tests/nfr/test_rdd_coverage.py -vv
Optional:
    NFR_MC_REPS=200       # replications per check (default 200)

Notes:
    - 95% intervals should cover the planted effect in at least 90% of replications.
    - Under a zero effect the 5% test should reject in at most 7% of replications.
    - Uses all available workers; results do not depend on the worker count.
"""

import os

import pytest

from fiscal_tiebout.rdd.montecarlo import run_monte_carlo
from fiscal_tiebout.rdd.panel import PanelParams

pytestmark = pytest.mark.nfr

PARAMS = PanelParams(n_munis=5000, n_years=4, propensity=0.5, kappa=0.05, beta1=2.0)


def _should_run():
    return os.getenv("RUN_NFR") == "1"


def _reps() -> int:
    return int(os.getenv("NFR_MC_REPS", "200"))


@pytest.mark.skipif(not _should_run(), reason="NFR tests are opt-in; set RUN_NFR=1 to enable")
def test_coverage_of_planted_effects():
    report = run_monte_carlo(PARAMS, _reps(), seed=2024, lag=1, estimators=("sharp", "fuzzy"))
    assert report.stat("sharp", "coverage") >= 0.90
    assert report.stat("fuzzy", "coverage") >= 0.90


@pytest.mark.skipif(not _should_run(), reason="NFR tests are opt-in; set RUN_NFR=1 to enable")
def test_size_under_the_null():
    report = run_monte_carlo(PARAMS.with_(kappa=0.0), _reps(), seed=7, lag=1, estimators=("sharp",))
    assert report.stat("sharp", "rejection_rate") <= 0.07
