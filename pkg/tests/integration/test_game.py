"""
Integration tests for the district expenditure game.

Each test runs the full chain: allocation -> PDV schedules -> tax schedules ->
district objectives -> best responses. Grids are coarse to keep runtime low.

LLM Prompt Example:
    "Show how to test a damped best-response solver whose period-2 inputs are
    rebuilt at every iterate, without knowing the equilibrium in closed form."
"""

import numpy as np
import pytest

import fiscal_tiebout.districts.game as game
from fiscal_tiebout.diagnostics.trace import SolverTrace
from fiscal_tiebout.districts.game import best_response, evaluate_profile, expenditure_bound, nash_equilibrium
from fiscal_tiebout.districts.grid import QualityGrid
from fiscal_tiebout.districts.horizon import stationary_horizon
from fiscal_tiebout.districts.objective import district_objective
from fiscal_tiebout.errors import NoConvergence, RateRequired
from fiscal_tiebout.market.allocation import assign_locations
from fiscal_tiebout.market.distributions import DistributionSpec
from fiscal_tiebout.market.economy import District, Economy
from fiscal_tiebout.market.money_values import money_values


def staggered(order=("A", "B")) -> Economy:
    housing = {"A": DistributionSpec.uniform(0.0, 0.7, 0.5), "B": DistributionSpec.uniform(0.3, 1.0, 0.5)}
    return Economy(districts=tuple(District(k, housing[k]) for k in order))


def mean_pdv(econ: Economy, j: int, e, nodes: int = 201) -> float:
    mvs = money_values(econ, assign_locations(econ, e), e)
    grid = QualityGrid.for_housing(econ.districts[j].housing, nodes)
    return grid.integrate(np.asarray(mvs.m_by_district(j, grid.q), dtype=float)) / grid.mass


def one_sided_slopes(econ: Economy, e_other: float, h: float = 0.05):
    mid = mean_pdv(econ, 0, [e_other, e_other])
    left = (mid - mean_pdv(econ, 0, [e_other - h, e_other])) / h
    right = (mean_pdv(econ, 0, [e_other + h, e_other]) - mid) / h
    return left, right


@pytest.fixture(scope="module")
def staggered_solution():
    econ = staggered()
    trace = SolverTrace(tolerance=1e-5)
    solution = nash_equilibrium(econ, nodes=101, tol=1e-5, xatol=1e-7, workers=1, trace=trace)
    return econ, solution, trace


def test_stationary_equilibrium_converges(staggered_solution):
    _, solution, trace = staggered_solution
    assert solution.br_residual <= 1e-5
    assert solution.iterations == trace.summary()["iterations"]
    assert not trace.summary()["cycle_detected"]
    assert sum(solution.e_star) > 0.0
    assert not solution.multiple_equilibria


def test_period_two_repeats_the_equilibrium(staggered_solution):
    _, solution, _ = staggered_solution
    assert solution.reference_residual <= 1e-12
    assert solution.trace["reference_residual"] == solution.reference_residual
    assert solution.horizon.reference_profile == pytest.approx(solution.e_star, abs=1e-12)
    for j, e_j in enumerate(solution.e_star):
        assert solution.horizon[j].e2 == pytest.approx(e_j, abs=1e-12)
    assert solution.horizon.nodes == 101


def test_equilibrium_is_a_mutual_best_response(staggered_solution):
    econ, solution, _ = staggered_solution
    for j in range(econ.n):
        br = best_response(econ, j, solution.e_star, horizon=solution.horizon, xatol=1e-7)
        assert br == pytest.approx(solution.e_star[j], abs=1e-4)


def test_zero_spending_reference_moves_the_best_response(staggered_solution):
    econ, solution, _ = staggered_solution
    zero = stationary_horizon(econ, [0.0, 0.0], nodes=101)
    br = best_response(econ, 0, solution.e_star, horizon=zero, xatol=1e-7)
    assert abs(br - solution.e_star[0]) > 1e-2


def test_tax_schedules_fund_spending(staggered_solution):
    _, solution, _ = staggered_solution
    for e_j, tax in zip(solution.e_star, solution.tax_star):
        assert tax.revenue == pytest.approx(e_j, abs=1e-8)


def test_relabelling_districts_permutes_the_equilibrium():
    kw = dict(nodes=51, tol=1e-4, xatol=1e-6, workers=1)
    ab = nash_equilibrium(staggered(("A", "B")), **kw).e_star
    ba = nash_equilibrium(staggered(("B", "A")), **kw).e_star
    assert ab[0] == pytest.approx(ba[1], abs=1e-4)
    assert ab[1] == pytest.approx(ba[0], abs=1e-4)


def test_pdvs_kink_where_identical_districts_tie(symmetric_economy):
    # away from the tie, the lower district alone houses the poorest types
    left, right = one_sided_slopes(symmetric_economy, 1.0)
    assert right < left - 0.05


def test_pdvs_are_smooth_away_from_a_tie(staggered_economy):
    left, right = one_sided_slopes(staggered_economy, 1.0)
    assert right == pytest.approx(left, abs=0.03)


def test_identical_districts_never_settle_on_a_symmetric_profile(symmetric_economy):
    try:
        solution = nash_equilibrium(symmetric_economy, nodes=51, tol=1e-4, xatol=1e-6, max_iter=80, workers=1)
    except NoConvergence as exc:
        assert exc.trace["iterations"] <= 80
    else:
        e = solution.e_star
        assert abs(e[0] - e[1]) > 1e-3 or e[0] == e[1] == 0.0


def test_two_cycle_stops_before_max_iter(staggered_economy, monkeypatch):
    # best responses jump between 0 and 2; damped iterates approach 2/3 <-> 4/3
    monkeypatch.setattr(game, "best_response", lambda econ, j, e, **kw: 2.0 if e[j] < 1.0 else 0.0)
    horizon = stationary_horizon(staggered_economy, [0.0, 0.0], nodes=11)
    with pytest.raises(NoConvergence, match="alternate") as exc:
        nash_equilibrium(staggered_economy, horizon=horizon, max_iter=500, workers=1)
    assert exc.value.trace["cycle_detected"]
    assert exc.value.trace["iterations"] < 100


def test_identical_districts_get_identical_objectives(symmetric_economy):
    for x in (0.0, 0.3, 1.0):
        horizon = stationary_horizon(symmetric_economy, [x, x], nodes=51)
        a = district_objective(symmetric_economy, 0, [x, x], horizon)
        b = district_objective(symmetric_economy, 1, [x, x], horizon)
        assert a.total == pytest.approx(b.total, abs=1e-10)
    horizon = stationary_horizon(symmetric_economy, [0.3, 0.3], nodes=51)
    values = evaluate_profile(symmetric_economy, [0.3, 0.3], horizon)
    assert values[0].total == pytest.approx(values[1].total, abs=1e-10)


def test_best_response_rises_with_school_weight(staggered_economy):
    responses = []
    for theta in (0.25, 0.5, 1.0):
        econ = staggered_economy.replace(theta=theta)
        horizon = stationary_horizon(econ, [0.5, 0.5], nodes=51)
        responses.append(best_response(econ, 0, [0.0, 0.5], horizon=horizon, xatol=1e-7))
    assert responses[0] <= responses[1] + 1e-6
    assert responses[1] <= responses[2] + 1e-6
    assert responses[2] > 0.0


def test_expenditure_bound(staggered_economy):
    horizon = stationary_horizon(staggered_economy, [0.5, 0.5], nodes=51)
    assert expenditure_bound(staggered_economy, 0, horizon) > 0.0
    assert expenditure_bound(staggered_economy.replace(theta=0.0), 0, horizon) == 0.0


def test_held_fixed_district_keeps_its_spending(staggered_economy):
    solution = nash_equilibrium(staggered_economy, nodes=51, initial=[0.2, 0.0], fixed=[0],
                                tol=1e-4, xatol=1e-6, workers=1)
    assert solution.e_star[0] == 0.2
    assert solution.reference_residual <= 1e-12


def test_iteration_cap_raises_with_trace(staggered_economy):
    with pytest.raises(NoConvergence) as exc:
        nash_equilibrium(staggered_economy, nodes=51, max_iter=1, tol=1e-12, workers=1)
    assert exc.value.trace["iterations"] == 1


def test_solver_argument_validation(staggered_economy):
    with pytest.raises(ValueError):
        nash_equilibrium(staggered_economy, damping=0.0)
    with pytest.raises(ValueError):
        stationary_horizon(staggered_economy, [0.0])
    with pytest.raises(RateRequired):
        stationary_horizon(staggered_economy.replace(r=0.0), [0.0, 0.0])
