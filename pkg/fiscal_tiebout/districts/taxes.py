"""
Optimal period-1 tax schedules.

The district raises revenue R from its homes to maximize incumbent owners'
welfare sum(w_i (1 - s_i) u(c_i)) where, at home i,

    c_i = w~_i + k_i - tau_i,      k_i = p2_i/(1+r) - m_i

is what the departing owner consumes after selling (two_period_price). The
share s_i of homes that are rented passes its tax through to landlords, who are
outside the objective. First-order conditions give

    (1 - s_i) u'(c_i) = lambda

so c_i = (u')^{-1}(lambda / (1 - s_i)); lambda is found by bracketed root
finding on log(lambda) so that the schedule raises exactly R. An all-rented
district has no owner to protect and taxes every home equally.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from ..errors import RevenueInfeasible
from ..econ.utility import UtilitySpec
from ..market.economy import Economy
from .grid import QualityGrid

log = logging.getLogger("fiscal_tiebout.districts")

ALL_RENTED = 1.0 - 1e-12
# scipy rejects brentq rtol below 4 eps
MULTIPLIER_RTOL = 4.0 * np.finfo(float).eps


@dataclass(frozen=True)
class TaxSchedule:
    """tau on the quality grid of one district, with the revenue it raises."""

    district: int
    q: np.ndarray
    tau: np.ndarray
    weights: np.ndarray
    required: float
    multiplier: float
    consumption: np.ndarray

    @property
    def revenue(self) -> float:
        return float(np.dot(self.weights, self.tau))

    def tau_at(self, q):
        return np.interp(q, self.q, self.tau)

    def marginal_utilities(self, utility: UtilitySpec) -> np.ndarray:
        return utility.marginal(self.consumption)


def _flat_schedule(j, grid, revenue, base) -> TaxSchedule:
    tau = np.full(grid.q.shape, revenue / grid.mass)
    return TaxSchedule(
        district=j, q=grid.q, tau=tau, weights=grid.weights, required=revenue, multiplier=0.0, consumption=base - tau
    )


def optimal_tax_schedule(
    econ: Economy,
    j: int,
    e: float,
    m,
    p2,
    *,
    grid: Optional[QualityGrid] = None,
    old_wealth=None,
    revenue: Optional[float] = None,
) -> TaxSchedule:
    """
    Owner-welfare maximizing schedule for district j funding expenditure e.

    Args:
        econ: scenario (utility, r, housing and renter shares of district j).
        j: district index.
        e: expenditure to fund.
        m: PDVs m^j(q) on the grid nodes.
        p2: resale prices on the grid nodes.
        grid: quadrature for Q^j (default: 401-node grid).
        old_wealth: w~ on the grid nodes (default: the district's own schedule).
        revenue: required revenue when it differs from e (fees, transfers).

    Raises:
        RevenueInfeasible: if the revenue cannot be raised with positive owner consumption.
    """
    if e < 0:
        raise ValueError("Expenditure must be nonnegative")
    district = econ.districts[j]
    grid = grid or QualityGrid.for_housing(district.housing)
    if old_wealth is None:
        old_wealth = district.old_wealth_at(grid.q)
    k = np.asarray(p2, dtype=float) / (1.0 + econ.r) - np.asarray(m, dtype=float)
    return schedule_for_revenue(
        econ.utility,
        j,
        float(e if revenue is None else revenue),
        np.asarray(old_wealth, dtype=float) + k,
        grid,
        district.renters_at(grid.q),
    )


def schedule_for_revenue(
    utility: UtilitySpec,
    j: int,
    revenue: float,
    base,
    grid: QualityGrid,
    renter_share=0.0,
) -> TaxSchedule:
    """
    Core solver: maximize owner welfare given pre-tax consumption `base` = w~ + k.

    Raises:
        RevenueInfeasible: if R cannot be raised with positive owner consumption.
    """
    base = np.broadcast_to(np.asarray(base, dtype=float), grid.q.shape).astype(float)
    share = np.broadcast_to(np.asarray(renter_share, dtype=float), grid.q.shape)
    if np.any(share < 0) or np.any(share > 1):
        raise ValueError("Renter shares must lie in [0, 1]")

    if np.all(share >= ALL_RENTED):
        return _flat_schedule(j, grid, revenue, base)
    if np.any(share >= ALL_RENTED):
        raise ValueError("Renter shares must be below 1 everywhere or equal to 1 everywhere")

    capacity = grid.integrate(base)
    if capacity <= revenue:
        raise RevenueInfeasible(
            f"District {j}: revenue {revenue:.6g} needs at least the owners' total resources {capacity:.6g}"
        )

    owner = 1.0 - share

    def consumption(log_lam: float) -> np.ndarray:
        with np.errstate(over="ignore", divide="ignore"):
            return utility.inverse_marginal(np.exp(log_lam) / owner)

    def gap(log_lam: float) -> float:
        return grid.integrate(base - consumption(log_lam)) - revenue

    # Start from the flat-tax multiplier and expand until the sign changes.
    c_flat = max(float(np.mean(base)) - revenue / grid.mass, 1e-6 * max(1.0, abs(float(np.mean(base)))))
    centre = float(np.log(utility.marginal(c_flat)))
    lo, hi = centre - 1.0, centre + 1.0
    for _ in range(200):
        if gap(lo) < 0:
            break
        lo -= 2.0 * (hi - lo)
    for _ in range(200):
        if gap(hi) > 0:
            break
        hi += 2.0 * (hi - lo)
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo == 0.0:
        log_lam = lo
    elif g_hi == 0.0:
        log_lam = hi
    elif g_lo < 0.0 < g_hi:
        log_lam = brentq(gap, lo, hi, xtol=1e-14, rtol=MULTIPLIER_RTOL, maxiter=500)
    else:  # pragma: no cover - revenue is monotone and unbounded below
        raise RevenueInfeasible(f"District {j}: could not bracket the tax multiplier")

    c = consumption(log_lam)
    tau = base - c
    log.debug("district %d: lambda=%.6g revenue=%.6g", j, np.exp(log_lam), grid.integrate(tau))
    return TaxSchedule(
        district=j,
        q=grid.q,
        tau=tau,
        weights=grid.weights,
        required=float(revenue),
        multiplier=float(np.exp(log_lam)),
        consumption=c,
    )
