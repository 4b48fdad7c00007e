"""
Period-2 inputs to the district problem.

Districts choose period-1 policy taking period-2 policy and resale prices as
given. The stationary horizon fixes them at a reference equilibrium:

    e2     = reference expenditure
    tau2   = flat schedule raising e2
    p2     = steady-state price ((1+r)/r)(-tau2 - m_ref)
    rent2  = (f2 + tau2)/(1+r) = -m_ref/(2+r)   (stationary rental identity)

Old-resident wealth defaults to the income of the type the reference
equilibrium places at each quality. The equilibrium solver rebuilds the horizon
at every iterate, so at convergence the reference is the equilibrium itself. A
hand-built HorizonInputs can replace the stationary one, e.g. to check that
revenue-neutral period-2 reshuffles leave period-1 choices alone.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Sequence, Tuple

import numpy as np

from ..market.allocation import assign_locations
from ..market.economy import Economy
from ..market.money_values import money_values
from ..market.prices import steady_state_prices
from .grid import DEFAULT_NODES, QualityGrid

log = logging.getLogger("fiscal_tiebout.districts")


@dataclass(frozen=True)
class DistrictHorizon:
    grid: QualityGrid
    e2: float
    tau2: np.ndarray
    p2: np.ndarray
    rent2: np.ndarray
    old_wealth: np.ndarray
    m_ref: np.ndarray


@dataclass(frozen=True)
class HorizonInputs:
    districts: Tuple[DistrictHorizon, ...]
    reference_profile: Tuple[float, ...]

    def __getitem__(self, j: int) -> DistrictHorizon:
        return self.districts[j]

    def with_period2_taxes(self, j: int, tau2, r: float) -> "HorizonInputs":
        """Replace district j's period-2 schedule; resale prices follow the steady-state formula."""
        h = self.districts[j]
        tau2 = np.asarray(tau2, dtype=float)
        p2 = steady_state_prices(h.m_ref, tau2, r)
        items = list(self.districts)
        items[j] = replace(h, tau2=tau2, p2=p2)
        return HorizonInputs(districts=tuple(items), reference_profile=self.reference_profile)

    @property
    def nodes(self) -> int:
        return int(self.districts[0].grid.q.size)

    def reference_residual(self, e: Sequence[float]) -> float:
        """max |reference - e|: zero when period 2 repeats the profile e."""
        return float(np.max(np.abs(np.asarray(self.reference_profile) - np.asarray(e, dtype=float))))


def stationary_horizon(
    econ: Economy,
    reference_profile: Sequence[float],
    *,
    nodes: int = DEFAULT_NODES,
) -> HorizonInputs:
    """
    Stationary period-2 inputs around `reference_profile`.

    Raises:
        RateRequired: if r <= 0 (steady-state prices are undefined).
        ValueError: if the profile does not have one entry per district.
    """
    ref = np.asarray(reference_profile, dtype=float)
    if ref.shape != (econ.n,):
        raise ValueError(f"Reference profile needs {econ.n} entries, got shape {ref.shape}")
    alloc = assign_locations(econ, ref)
    mvs = money_values(econ, alloc, ref)
    items = []
    for j, d in enumerate(econ.districts):
        grid = QualityGrid.for_housing(d.housing, nodes)
        m_ref = np.asarray(mvs.m_by_district(j, grid.q), dtype=float)
        tau2 = np.full(grid.q.shape, ref[j] / grid.mass)
        p2 = np.asarray(steady_state_prices(m_ref, tau2, econ.r), dtype=float)
        rent2 = -m_ref / (2.0 + econ.r)
        if d.old_wealth is None:
            wealth = np.asarray(alloc.type_for_quality(j, grid.q), dtype=float)
        else:
            wealth = np.asarray(d.old_wealth_at(grid.q), dtype=float)
        items.append(
            DistrictHorizon(grid=grid, e2=float(ref[j]), tau2=tau2, p2=p2, rent2=rent2, old_wealth=wealth, m_ref=m_ref)
        )
    log.debug("stationary horizon at reference profile %s", ref.tolist())
    return HorizonInputs(districts=tuple(items), reference_profile=tuple(float(x) for x in ref))
