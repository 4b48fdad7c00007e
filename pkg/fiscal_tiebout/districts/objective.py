"""
The district objective.

    Pi^j = theta (s_j(e1) + s_j(e2))
         + sum over owned homes   u(w~ + p(q))            (departing owners)
         + sum over rented homes  u(w~ + m(q) + rent2(q)) (departing renters)

p(q) = -tau1(q) + p2(q)/(1+r) - m(q) with tau1 the optimal schedule raising the
required revenue. Renters pay f1 + tau1 = -m - rent2, so their consumption does
not depend on how taxes are spread; it moves with e only through m.

Infeasible candidates (revenue beyond the owners' resources, renters unable to
consume) evaluate to -inf so that searches steer away from them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import RevenueInfeasible
from ..market.allocation import assign_locations
from ..market.economy import Economy
from ..market.money_values import MoneyValueSolution, money_values
from .horizon import DistrictHorizon, HorizonInputs, stationary_horizon
from .taxes import TaxSchedule, schedule_for_revenue

log = logging.getLogger("fiscal_tiebout.districts")

# (district index, expenditure profile) -> revenue the district must raise
BudgetRule = Callable[[int, Sequence[float]], float]


def own_expenditure(j: int, e: Sequence[float]) -> float:
    return float(e[j])


@dataclass(frozen=True)
class DistrictObjectiveValue:
    school_term: float
    owner_welfare: float
    renter_welfare: float
    total: float
    tax: Optional[TaxSchedule] = None

    @property
    def feasible(self) -> bool:
        return bool(np.isfinite(self.total))

    @classmethod
    def infeasible(cls, school_term: float) -> "DistrictObjectiveValue":
        return cls(school_term=school_term, owner_welfare=-np.inf, renter_welfare=-np.inf, total=-np.inf)


def objective_from_pdvs(
    econ: Economy,
    j: int,
    e_j: float,
    m_nodes,
    horizon: DistrictHorizon,
    revenue: Optional[float] = None,
) -> DistrictObjectiveValue:
    """Objective of district j when the PDVs on its grid are already known."""
    d = econ.districts[j]
    u, r, grid = econ.utility, econ.r, horizon.grid
    school = float(econ.theta * (econ.school_quality(j, e_j) + econ.school_quality(j, horizon.e2)))
    m_nodes = np.asarray(m_nodes, dtype=float)
    share = np.broadcast_to(np.asarray(d.renters_at(grid.q), dtype=float), grid.q.shape)

    renter_c = horizon.old_wealth + m_nodes + horizon.rent2
    if np.any((share > 0) & (renter_c <= 0)):
        return DistrictObjectiveValue.infeasible(school)
    renter = grid.integrate(share * np.where(share > 0, u.u(renter_c), 0.0))

    base = horizon.old_wealth + horizon.p2 / (1.0 + r) - m_nodes
    try:
        tax = schedule_for_revenue(u, j, float(e_j if revenue is None else revenue), base, grid, share)
    except RevenueInfeasible:
        return DistrictObjectiveValue.infeasible(school)
    if np.all(share >= 1.0):
        owner = 0.0
    else:
        owner = grid.integrate((1.0 - share) * u.u(tax.consumption))

    total = school + owner + renter
    return DistrictObjectiveValue(
        school_term=school, owner_welfare=float(owner), renter_welfare=float(renter), total=float(total), tax=tax
    )


def objective_with_prices(
    econ: Economy,
    j: int,
    e: Sequence[float],
    mvs: MoneyValueSolution,
    horizon: HorizonInputs,
    budget: BudgetRule = own_expenditure,
) -> DistrictObjectiveValue:
    h = horizon[j]
    m_nodes = mvs.m_by_district(j, h.grid.q)
    return objective_from_pdvs(econ, j, float(e[j]), m_nodes, h, budget(j, e))


def district_objective(
    econ: Economy,
    j: int,
    e: Sequence[float],
    horizon: Optional[HorizonInputs] = None,
    *,
    budget: BudgetRule = own_expenditure,
) -> DistrictObjectiveValue:
    """
    Pi^j at expenditure profile e.

    Args:
        econ: scenario.
        j: district index.
        e: full expenditure profile.
        horizon: period-2 inputs (default: the stationary horizon at e).
        budget: revenue rule; defaults to funding own expenditure.
    """
    e = np.asarray(e, dtype=float)
    horizon = horizon or stationary_horizon(econ, e)
    alloc = assign_locations(econ, e)
    mvs = money_values(econ, alloc, e)
    return objective_with_prices(econ, j, e, mvs, horizon, budget)
