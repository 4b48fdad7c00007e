"""
Renters: stationary rents and the expenditure-floor check.

A renter at q pays f1 + tau1 now and f2 + tau2 next period, and the rental
market prices the home at its PDV:

    f1 + tau1 + (f2 + tau2)/(1+r) = -m(q)

In a steady state f1 = f2 = f and tau1 = tau2 = tau, so

    f = -m (1+r)/(2+r) - tau.

Districts dominated by renters gain nothing from capitalization and spend too
little in equilibrium; a common floor above equilibrium spending then helps all
of them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from ..districts.game import GameSolution, baseline_horizon, evaluate_profile, fixed_gap_profile, nash_equilibrium
from ..districts.horizon import HorizonInputs
from ..districts.taxes import TaxSchedule
from ..market.economy import Economy
from ..market.money_values import MoneyValueSolution
from .instruments import PARETO_SLACK, RentalOutcome

log = logging.getLogger("fiscal_tiebout.policy")


def stationary_rent(m, tau, r: float):
    """Per-period rent net of tax. Vectorized."""
    out = -np.asarray(m, dtype=float) * (1.0 + r) / (2.0 + r) - np.asarray(tau, dtype=float)
    return float(out) if out.ndim == 0 else out


def rental_rates(mvs: MoneyValueSolution, tax: TaxSchedule, r: float) -> RentalOutcome:
    """Stationary rents on the grid of `tax` (tau1 = tau2 = the given schedule)."""
    m = np.asarray(mvs.m_by_district(tax.district, tax.q), dtype=float)
    f = np.asarray(stationary_rent(m, tax.tau, r), dtype=float)
    return RentalOutcome(district=tax.district, q=tax.q, f1=f, f2=f.copy(), tau1=tax.tau, tau2=tax.tau.copy(), m=m)


@dataclass(frozen=True)
class FloorReport:
    applicable: bool
    e_star: Tuple[float, ...]
    e_fixed_gap: Tuple[float, ...]
    underspending: Tuple[bool, ...]
    floor_increase: Optional[float]
    objective_delta: Tuple[float, ...]
    pareto: bool
    sweep: Tuple[dict, ...] = field(default_factory=tuple)

    def rows(self, ids: Sequence[str]) -> list:
        return [
            {
                "district": ids[j],
                "e_star": self.e_star[j],
                "e_fixed_gap": self.e_fixed_gap[j],
                "underspending": self.underspending[j],
                "objective_delta": self.objective_delta[j] if self.objective_delta else float("nan"),
            }
            for j in range(len(ids))
        ]


def expenditure_floor_check(
    econ: Economy,
    *,
    horizon: Optional[HorizonInputs] = None,
    baseline: Optional[GameSolution] = None,
    n_grid: int = 8,
    **solver_kwargs,
) -> FloorReport:
    """
    Compare equilibrium spending with the fixed-gap benchmark and test common floors.

    The floor raises every district's spending by the same delta in
    (0, min_j(e~_j - e*_j)]; the delta with the largest minimum gain is reported.
    When some district already spends at least its benchmark the check is not
    applicable and only the per-district signs are returned.
    """
    baseline = baseline or nash_equilibrium(econ, horizon=horizon, **solver_kwargs)
    horizon = baseline_horizon(econ, baseline, horizon, nodes=solver_kwargs.get("nodes"))
    e_star = np.asarray(baseline.e_star)
    tilde = fixed_gap_profile(econ, e_star, horizon=horizon)
    e_tilde = np.array([tilde[j] for j in range(econ.n)])
    under = tuple(bool(e_tilde[j] > e_star[j] + baseline.resolution) for j in range(econ.n))

    if not all(under):
        log.info("Floor check not applicable: underspending flags %s", under)
        return FloorReport(
            applicable=False,
            e_star=tuple(e_star.tolist()),
            e_fixed_gap=tuple(e_tilde.tolist()),
            underspending=under,
            floor_increase=None,
            objective_delta=(),
            pareto=False,
        )

    delta_max = float(np.min(e_tilde - e_star))
    base_totals = np.asarray(baseline.totals)
    sweep, best = [], None
    for delta in delta_max * np.arange(1, n_grid + 1) / n_grid:
        values = evaluate_profile(econ, e_star + delta, horizon)
        deltas = np.array([v.total for v in values]) - base_totals
        sweep.append({"delta": float(delta), "min_gain": float(deltas.min()), **{f"gain_{j}": float(d) for j, d in enumerate(deltas)}})
        if best is None or deltas.min() > best[1].min():
            best = (float(delta), deltas)

    delta, deltas = best
    return FloorReport(
        applicable=True,
        e_star=tuple(e_star.tolist()),
        e_fixed_gap=tuple(e_tilde.tolist()),
        underspending=under,
        floor_increase=delta,
        objective_delta=tuple(deltas.tolist()),
        pareto=bool(np.all(deltas >= -PARETO_SLACK)),
        sweep=tuple(sweep),
    )
