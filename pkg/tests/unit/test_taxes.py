"""
Unit tests for the district tax schedule, quadrature grid and bounded search.
"""

import math

import numpy as np
import pytest

from fiscal_tiebout.districts.grid import QualityGrid
from fiscal_tiebout.districts.search import maximize_bounded
from fiscal_tiebout.districts.taxes import schedule_for_revenue
from fiscal_tiebout.econ.utility import UtilitySpec
from fiscal_tiebout.errors import RevenueInfeasible
from fiscal_tiebout.market.distributions import DistributionSpec

LOG = UtilitySpec("log")


def two_groups() -> QualityGrid:
    return QualityGrid(q=np.array([0.0, 1.0]), weights=np.array([0.5, 0.5]))


def test_grid_integrates_linear_functions_exactly():
    grid = QualityGrid.for_housing(DistributionSpec.uniform(0.0, 1.0, 0.5), n=5)
    assert grid.mass == pytest.approx(0.5)
    assert grid.integrate(grid.q) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        QualityGrid.for_housing(DistributionSpec.uniform(0.0, 1.0), n=1)


def test_constant_wealth_gives_flat_schedule():
    grid = QualityGrid.for_housing(DistributionSpec.uniform(0.0, 1.0, 0.5), n=11)
    tax = schedule_for_revenue(LOG, 0, 1.0, 10.0, grid)
    assert np.allclose(tax.tau, 2.0, atol=1e-9)
    assert tax.revenue == pytest.approx(1.0, abs=1e-9)


def test_two_wealth_levels_equalize_consumption():
    tax = schedule_for_revenue(LOG, 0, 1.0, np.array([5.0, 10.0]), two_groups())
    assert np.allclose(tax.consumption, 6.5, atol=1e-6)
    assert np.allclose(tax.tau, [-1.5, 3.5], atol=1e-6)
    assert tax.revenue == pytest.approx(1.0, abs=1e-9)


def test_two_wealth_levels_match_direct_optimizer():
    from scipy.optimize import minimize_scalar

    # tau_rich = 2 - tau_poor keeps revenue at 1
    res = minimize_scalar(
        lambda t: -(0.5 * math.log(5.0 - t) + 0.5 * math.log(10.0 - (2.0 - t))),
        bounds=(-7.9, 4.9),
        method="bounded",
        options={"xatol": 1e-12},
    )
    tax = schedule_for_revenue(LOG, 0, 1.0, np.array([5.0, 10.0]), two_groups())
    assert tax.tau[0] == pytest.approx(res.x, abs=1e-6)


def test_heterogeneous_owners_on_a_fine_grid():
    grid = QualityGrid.for_housing(DistributionSpec.uniform(0.0, 1.0, 0.5), n=401)
    base = 60.0 + 40.0 * grid.q
    tax = schedule_for_revenue(LOG, 0, 3.0, base, grid)
    assert tax.revenue == pytest.approx(3.0, abs=1e-9)
    # log utility equalizes consumption across owners
    assert np.allclose(tax.consumption, grid.integrate(base - 6.0) / grid.mass, rtol=1e-10)
    assert np.all(np.diff(tax.tau) > 0)
    assert tax.multiplier == pytest.approx(1.0 / tax.consumption[0], rel=1e-10)


def test_zero_revenue_means_zero_taxes():
    base = np.array([5.0, 10.0])
    tax = schedule_for_revenue(LOG, 0, 0.0, base, two_groups())
    assert np.allclose(tax.tau, 0.0, atol=1e-9)
    assert two_groups().integrate(LOG.u(tax.consumption)) == pytest.approx(two_groups().integrate(np.log(base)))


def test_renter_share_shifts_burden():
    grid = two_groups()
    tax = schedule_for_revenue(LOG, 0, 1.0, 10.0, grid, renter_share=np.array([0.0, 0.5]))
    assert tax.tau[1] > tax.tau[0]
    assert tax.revenue == pytest.approx(1.0, abs=1e-9)

    rented = schedule_for_revenue(LOG, 0, 1.0, np.array([5.0, 10.0]), grid, renter_share=1.0)
    assert np.allclose(rented.tau, 1.0)
    assert rented.multiplier == 0.0


def test_revenue_beyond_resources_is_infeasible():
    with pytest.raises(RevenueInfeasible):
        schedule_for_revenue(LOG, 0, 20.0, np.array([5.0, 10.0]), two_groups())
    with pytest.raises(ValueError):
        schedule_for_revenue(LOG, 0, 1.0, 10.0, two_groups(), renter_share=np.array([1.0, 0.5]))


def test_maximize_bounded_interior_and_boundary():
    x, fx = maximize_bounded(lambda x: -(x - 0.3) ** 2, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-6)
    assert fx == pytest.approx(0.0, abs=1e-10)
    x, _ = maximize_bounded(lambda x: x, 0.0, 2.0)
    assert x == 2.0


def test_maximize_bounded_ties_and_non_finite_values():
    x, _ = maximize_bounded(lambda x: 1.0, 0.0, 1.0)
    assert x == 0.0
    x, _ = maximize_bounded(lambda x: -np.inf if x > 0.5 else x, 0.0, 1.0)
    assert x == pytest.approx(0.5, abs=1e-4)
    with pytest.raises(ValueError):
        maximize_bounded(lambda x: x, 1.0, 0.0)


def test_maximize_bounded_finds_a_peak_near_the_lower_end():
    # a single bounded search over [0, 100] settles on the broad bump at 50
    def f(x):
        return math.exp(-((x - 0.3) / 0.2) ** 2) + 0.9 * math.exp(-((x - 50.0) / 10.0) ** 2)

    x, fx = maximize_bounded(f, 0.0, 100.0)
    assert x == pytest.approx(0.3, abs=1e-5)
    assert fx == pytest.approx(1.0, abs=1e-8)
    assert maximize_bounded(f, 10.0, 100.0)[0] == pytest.approx(50.0, abs=1e-4)
