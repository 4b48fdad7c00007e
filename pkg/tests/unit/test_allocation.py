"""
Unit tests for fiscal_tiebout.market: allocation, money values, prices, audit and oracle.

LLM Prompt Example:
    "Show tests that check a continuous matching solution against closed-form
    cutoffs and a brute-force discrete equilibrium."
"""

import numpy as np
import pytest

from fiscal_tiebout.econ.utility import UtilitySpec
from fiscal_tiebout.errors import MassMismatch, RateRequired
from fiscal_tiebout.market.allocation import assign_by_quality, assign_locations
from fiscal_tiebout.market.audit import ic_audit
from fiscal_tiebout.market.distributions import DistributionSpec
from fiscal_tiebout.market.economy import District, Economy
from fiscal_tiebout.market.money_values import money_values
from fiscal_tiebout.market.oracle import discrete_equilibrium
from fiscal_tiebout.market.prices import steady_state_prices, two_period_price


# ---------------------------------------------------------------------------
# allocation
# ---------------------------------------------------------------------------
def test_uniform_cutoffs_with_school_gap(uniform_economy):
    alloc = assign_by_quality(uniform_economy, [0.2, 0.0])
    assert alloc.lower_cutoff == pytest.approx(0.1, abs=1e-12)
    assert alloc.upper_cutoff == pytest.approx(0.9, abs=1e-12)
    assert alloc.segments[0].active == (1,)
    assert alloc.segments[-1].active == (0,)
    # types below 0.1 all settle in B, types above 0.9 all in A
    assert alloc.gamma(1, 0.1) == pytest.approx(0.1, abs=1e-12)
    assert alloc.gamma(0, 0.1) == pytest.approx(0.0, abs=1e-12)
    assert alloc.gamma(0, 1.0) - alloc.gamma(0, 0.9) == pytest.approx(0.1, abs=1e-12)
    assert alloc.house_choice(1, 0.1) == pytest.approx(0.2, abs=1e-12)
    assert alloc.house_choice(0, 0.9) == pytest.approx(0.8, abs=1e-12)


def test_market_clears(default_economy):
    alloc = assign_locations(default_economy, [0.3, 1.0, 2.0])
    for j, d in enumerate(default_economy.districts):
        assert alloc.gamma(j, default_economy.w_max) == pytest.approx(d.mass, abs=1e-12)
    w = np.linspace(default_economy.w_min, default_economy.w_max, 101)
    total = sum(alloc.gamma(j, w) for j in range(default_economy.n))
    assert np.allclose(total, default_economy.income.cdf(w), atol=1e-12)


def test_symmetric_profile_splits_evenly(symmetric_economy):
    alloc = assign_locations(symmetric_economy, [1.0, 1.0])
    w = np.linspace(5.0, 15.0, 21)
    assert np.allclose(alloc.gamma(0, w), alloc.gamma(1, w), atol=1e-12)
    assert np.allclose(alloc.house_choice(0, w), alloc.house_choice(1, w), atol=1e-12)
    assert alloc.lower_cutoff == symmetric_economy.w_min
    assert alloc.upper_cutoff == symmetric_economy.w_max


def test_quality_dominance_segregates(dominance_economy):
    alloc = assign_locations(dominance_economy, [0.0, 0.0])
    assert alloc.gamma(1, 10.0) == pytest.approx(0.5, abs=1e-12)
    assert alloc.gamma(0, 10.0) == pytest.approx(0.0, abs=1e-12)
    assert len(alloc.jumps()) == 1
    w_jump, gap = alloc.jumps()[0]
    assert w_jump == pytest.approx(10.0)
    assert gap == pytest.approx(0.6)


def test_homogeneous_housing_splits_atom(homogeneous_economy):
    alloc = assign_locations(homogeneous_economy, [0.0, 0.0])
    assert alloc.gamma(0, 10.0) == pytest.approx(0.25, abs=1e-12)
    assert alloc.house_choice(0, 7.0) == pytest.approx(0.5)


def test_allocation_input_validation(symmetric_economy):
    with pytest.raises(ValueError):
        assign_locations(symmetric_economy, [1.0])
    with pytest.raises(ValueError):
        assign_locations(symmetric_economy, [-1.0, 0.0])
    bad = Economy(districts=(District("A", DistributionSpec.uniform(0, 1, 0.4)), District("B", DistributionSpec.uniform(0, 1, 0.5))))
    with pytest.raises(MassMismatch):
        assign_locations(bad, [0.0, 0.0])


# ---------------------------------------------------------------------------
# money values
# ---------------------------------------------------------------------------
def test_money_value_boundary_and_monotone_m(uniform_economy):
    e = np.zeros(2)
    mvs = money_values(uniform_economy, assign_locations(uniform_economy, e), e)
    assert mvs.M(0.0) == pytest.approx(uniform_economy.lower_money_value, abs=1e-12)
    assert mvs.m(0.0) == pytest.approx(1.0, abs=1e-12)
    w = np.linspace(0.0, 1.0, 201)
    assert np.all(np.diff(mvs.m(w)) < 0)


def test_pdvs_agree_across_active_districts(uniform_economy):
    alloc = assign_by_quality(uniform_economy, [0.2, 0.0])
    mvs = money_values(uniform_economy, alloc)
    w = np.linspace(0.15, 0.85, 15)
    m_a = mvs.m_by_district(0, alloc.house_choice(0, w))
    m_b = mvs.m_by_district(1, alloc.house_choice(1, w))
    assert np.allclose(m_a, m_b, atol=1e-8)


def test_gap_invariance(uniform_economy):
    first = money_values(uniform_economy, assign_by_quality(uniform_economy, [0.2, 0.0]))
    second = money_values(uniform_economy, assign_by_quality(uniform_economy, [0.5, 0.3]))
    w = np.linspace(0.0, 1.0, 101)
    assert np.allclose(first.M(w), second.M(w), atol=1e-9)
    assert np.allclose(first.m(w), second.m(w), atol=1e-9)


def test_crra_integration_matches_log_structure(symmetric_economy):
    crra = symmetric_economy.replace(utility=UtilitySpec("crra", gamma=2.0))
    e = np.array([0.5, 0.5])
    mvs = money_values(crra, assign_locations(crra, e), e)
    w = np.linspace(5.0, 15.0, 51)
    assert np.all(np.diff(mvs.m(w)) < 0)
    assert mvs.M(5.0) == pytest.approx(crra.lower_money_value, abs=1e-12)


def test_exact_method_requires_log(symmetric_economy):
    crra = symmetric_economy.replace(utility=UtilitySpec("crra", gamma=2.0))
    e = np.zeros(2)
    with pytest.raises(ValueError):
        money_values(crra, assign_locations(crra, e), e, method="exact")


def test_oracle_matches_continuous_solution(uniform_economy):
    e = np.zeros(2)
    mvs = money_values(uniform_economy, assign_locations(uniform_economy, e), e)
    oracle = discrete_equilibrium(uniform_economy, e, n=200)
    m_cont = np.array([mvs.m_by_district(j, q) for j, q in zip(oracle.district, oracle.quality)])
    scale = np.max(np.abs(m_cont))
    assert np.max(np.abs(oracle.m - m_cont)) / scale < 1e-3


def test_oracle_cutoffs_within_one_cell(uniform_economy):
    e = np.array([uniform_economy.technology.inverse(0.2), 0.0])
    alloc = assign_locations(uniform_economy, e)
    oracle = discrete_equilibrium(uniform_economy, e, n=200)
    cell = 1.0 / 200
    assert abs(oracle.last_type_in(1) - alloc.upper_cutoff) <= cell
    assert abs(oracle.first_type_in(0) - alloc.lower_cutoff) <= cell


# ---------------------------------------------------------------------------
# prices
# ---------------------------------------------------------------------------
def test_steady_state_prices_examples():
    assert steady_state_prices(-2.0, 1.0, 0.05) == pytest.approx(21.0)
    bump = steady_state_prices(-2.0, 1.01, 0.05) - steady_state_prices(-2.0, 1.0, 0.05)
    assert bump == pytest.approx(-0.21, abs=1e-9)
    assert steady_state_prices(-3.0, 3.0, 0.05) == pytest.approx(0.0)
    with pytest.raises(RateRequired):
        steady_state_prices(-2.0, 1.0, 0.0)


def test_steady_state_price_is_fixed_point():
    p, tau, m, r = 0.0, 1.0, -2.0, 0.05
    for _ in range(2000):
        p = two_period_price(tau, p, m, r)
    assert p == pytest.approx(steady_state_prices(m, tau, r), abs=1e-9)


def test_two_period_price_examples():
    assert two_period_price(0.0, 0.0, 0.0, 0.05) == 0.0
    assert two_period_price(1.0, 1.05, -2.0, 0.05) == pytest.approx(2.0)


# ---------------------------------------------------------------------------
# incentive-compatibility audit
# ---------------------------------------------------------------------------
def test_ic_audit_passes_on_equilibrium(default_economy):
    e = np.array([0.2, 0.5, 1.0])
    alloc = assign_locations(default_economy, e)
    report = ic_audit(default_economy, alloc, money_values(default_economy, alloc, e), 10_000, seed=1)
    assert report.passed
    assert report.max_violation <= 1e-6
    assert report.as_dict()["n_checked"] == 10_000


def test_ic_audit_detects_corrupted_prices(uniform_economy):
    e = np.zeros(2)
    alloc = assign_locations(uniform_economy, e)
    mvs = money_values(uniform_economy, alloc, e).shifted(0, 0.1)
    report = ic_audit(uniform_economy, alloc, mvs, 10_000, seed=1)
    assert not report.passed
    assert report.max_violation > 0.05
    assert report.worst[2] == "A"


def test_ic_audit_is_deterministic(symmetric_economy):
    e = np.array([0.4, 0.4])
    alloc = assign_locations(symmetric_economy, e)
    mvs = money_values(symmetric_economy, alloc, e)
    assert ic_audit(symmetric_economy, alloc, mvs, 2000, seed=3) == ic_audit(symmetric_economy, alloc, mvs, 2000, seed=3)


def _four_districts() -> Economy:
    quarter = 0.25
    return Economy(districts=tuple(
        District(name, DistributionSpec.uniform(lo, lo + 0.4, quarter))
        for name, lo in (("A", 0.0), ("B", 0.2), ("C", 0.4), ("D", 0.6))
    ))


@pytest.mark.parametrize(
    "name, e",
    [
        ("uniform_economy", [0.3, 0.0]),
        ("symmetric_economy", [0.5, 0.2]),
        ("default_economy", [0.2, 0.5, 1.0]),
        ("renter_economy", [1.0, 0.0]),
        ("four", [0.1, 0.4, 0.2, 0.8]),
    ],
)
def test_clearing_and_monotone_locations(request, name, e):
    econ = _four_districts() if name == "four" else request.getfixturevalue(name)
    alloc = assign_locations(econ, e)
    w = np.linspace(econ.w_min, econ.w_max, 1000)
    total = sum(alloc.gamma(j, w) for j in range(econ.n))
    assert np.max(np.abs(total - econ.income.cdf(w))) <= 1e-9
    assert np.all(np.diff(alloc.location(w)) >= -1e-12)
