"""
Unit tests for fiscal_tiebout.econ (utility families and the two-period savings problem).
"""

import math

import numpy as np
import pytest

from fiscal_tiebout.econ.savings import (
    PaymentPriceVector,
    invert_value_in_money,
    marginal_value,
    money_marginal_value,
    pdv,
    solve_savings,
    value_in_money,
)
from fiscal_tiebout.econ.utility import UtilitySpec
from fiscal_tiebout.errors import InfeasibleBudget, Unattainable

LOG = UtilitySpec("log")
CRRA = UtilitySpec("crra", gamma=2.0)


@pytest.mark.parametrize(
    "tau,p1,p2,r,expected",
    [(1.0, 2.0, 3.0, 0.0, 0.0), (0.0, 0.0, 1.05, 0.05, 1.0), (1.0, 2.0, 3.0, 0.5, -1.0)],
)
def test_pdv_examples(tau, p1, p2, r, expected):
    assert pdv(PaymentPriceVector(tau=tau, p1=p1, p2=p2), r) == pytest.approx(expected, abs=1e-12)


def test_pdv_rejects_rate_at_minus_one():
    with pytest.raises(ValueError):
        pdv(PaymentPriceVector(), -1.0)


def test_solve_savings_no_trade_smooths_consumption():
    sol = solve_savings(10.0, PaymentPriceVector(), 0.0, LOG)
    assert sol.b == pytest.approx(0.0, abs=1e-9)
    assert sol.c1 == pytest.approx(10.0, abs=1e-9)
    assert sol.c2 == pytest.approx(10.0, abs=1e-9)
    assert sol.value == pytest.approx(2.0 * math.log(10.0), abs=1e-12)


def test_solve_savings_zero_pdv_bundle_borrows():
    sol = solve_savings(10.0, PaymentPriceVector(tau=2.0, p1=3.0, p2=5.0), 0.0, LOG)
    assert sol.b == pytest.approx(-5.0, abs=1e-9)
    assert sol.c1 == pytest.approx(sol.c2, abs=1e-9)
    assert sol.value == pytest.approx(2.0 * math.log(10.0), abs=1e-12)


def test_solve_savings_matches_grid_search_crra():
    z = PaymentPriceVector(tau=1.0, p1=2.0, p2=0.0)
    r = 0.05
    sol = solve_savings(10.0, z, r, CRRA)
    b = np.linspace(sol.b - 0.01, sol.b + 0.01, 20_001)
    vals = CRRA.u(10.0 - 3.0 - b) + CRRA.u(10.0 + (1.0 + r) * b)
    assert sol.b == pytest.approx(b[np.argmax(vals)], abs=2e-6)
    assert sol.value >= vals.max() - 1e-12


def test_solve_savings_infeasible_budget():
    with pytest.raises(InfeasibleBudget):
        solve_savings(1.0, PaymentPriceVector(tau=5.0, p1=0.0, p2=0.0), 0.0, LOG)


def test_value_depends_only_on_pdv():
    rng = np.random.default_rng(0)
    r = 0.05
    for _ in range(20):
        tau, p1 = rng.uniform(-1, 1, 2)
        m = -p1 - tau
        p2 = rng.uniform(0, 2)
        z = PaymentPriceVector(tau=tau - p2 / (1 + r), p1=p1, p2=p2)
        assert pdv(z, r) == pytest.approx(m, abs=1e-12)
        v = solve_savings(10.0, z, r, CRRA).value
        assert v == pytest.approx(float(value_in_money(10.0, m, r, CRRA)), abs=1e-9)


def test_marginal_value_closed_form():
    assert marginal_value(10.0, PaymentPriceVector(), 0.0, LOG) == pytest.approx(0.2, abs=1e-12)
    zero_pdv = PaymentPriceVector(tau=2.0, p1=3.0, p2=5.0)
    assert marginal_value(10.0, zero_pdv, 0.0, LOG) == pytest.approx(0.2, abs=1e-9)


def test_marginal_value_matches_finite_difference():
    z = PaymentPriceVector(tau=1.0, p1=2.0, p2=0.0)
    h = 1e-5
    fd = (solve_savings(10 + h, z, 0.05, CRRA).value - solve_savings(10 - h, z, 0.05, CRRA).value) / (2 * h)
    assert marginal_value(10.0, z, 0.05, CRRA) == pytest.approx(fd, rel=1e-6)


def test_single_crossing():
    r = 0.05
    lo_w, hi_w, lo_m, hi_m = 6.0, 12.0, -3.0, 1.0
    rich_gain = value_in_money(hi_w, lo_m, r, CRRA) - value_in_money(hi_w, hi_m, r, CRRA)
    poor_gain = value_in_money(lo_w, lo_m, r, CRRA) - value_in_money(lo_w, hi_m, r, CRRA)
    assert rich_gain >= poor_gain
    assert money_marginal_value(10.0, -1.0, r, LOG) > money_marginal_value(10.0, 1.0, r, LOG)


def test_invert_value_round_trips():
    assert invert_value_in_money(10.0, 2.0 * math.log(10.0), 0.0, LOG) == pytest.approx(0.0, abs=1e-9)
    target = float(value_in_money(10.0, 3.0, 0.0, LOG))
    assert invert_value_in_money(10.0, target, 0.0, LOG) == pytest.approx(3.0, abs=1e-9)
    target = float(value_in_money(7.0, 1.25, 0.05, CRRA))
    assert invert_value_in_money(7.0, target, 0.05, CRRA) == pytest.approx(1.25, abs=1e-8)


def test_invert_value_out_of_range():
    # CRRA with gamma > 1 is bounded above by zero
    with pytest.raises(Unattainable):
        invert_value_in_money(7.0, 0.5, 0.05, CRRA)


def test_utility_spec_validation():
    with pytest.raises(ValueError):
        UtilitySpec("crra", gamma=1.0)
    with pytest.raises(ValueError):
        UtilitySpec("quadratic")
    assert LOG.first_period_share(0.05) == pytest.approx(2.0)
    assert np.isneginf(LOG.lifetime_value(-1.0, 0.05))
