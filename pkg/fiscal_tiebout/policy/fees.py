"""
Tax-on-tax fees.

Districts announce-before: the fee schedule is known when spending is chosen,
so each district's budget rule becomes

    revenue_j = e_j + fee_rate * max(0, e_j - threshold_j) - weight_j * (all fees)

and the game is solved again with that rule.
"""

from __future__ import annotations

import logging
from typing import Optional

from ..districts.game import GameSolution, baseline_horizon, nash_equilibrium
from ..districts.horizon import HorizonInputs
from ..market.economy import Economy
from .instruments import FeePolicy, PolicyReport

log = logging.getLogger("fiscal_tiebout.policy")

BUDGET_TOL = 1e-9


def solve_fee_policy(
    econ: Economy,
    policy: FeePolicy,
    *,
    baseline: Optional[GameSolution] = None,
    horizon: Optional[HorizonInputs] = None,
    **solver_kwargs,
) -> PolicyReport:
    """
    Equilibrium under the fee policy, compared with the baseline.

    A zero fee rate returns the baseline as the treated solution.

    Raises:
        NoConvergence: propagated from the game solver.
    """
    if len(policy.threshold) != econ.n:
        raise ValueError(f"Fee policy covers {len(policy.threshold)} districts, economy has {econ.n}")
    ids = [d.id for d in econ.districts]
    baseline = baseline or nash_equilibrium(econ, horizon=horizon, **solver_kwargs)
    horizon = baseline_horizon(econ, baseline, horizon, nodes=solver_kwargs.get("nodes"))

    if policy.fee_rate == 0.0:
        treated = baseline
    else:
        solver_kwargs.pop("initial", None)
        treated = nash_equilibrium(econ, horizon=horizon, budget=policy, initial=baseline.e_star, **solver_kwargs)

    audit = policy.budget_audit(treated.e_star)
    if abs(audit["imbalance"]) > BUDGET_TOL:  # pragma: no cover - weights sum to one
        log.warning("Fee budget imbalance %.3e", audit["imbalance"])
    fees = {ids[j]: policy.fee(j, treated.e_star[j]) for j in range(econ.n)}
    transfers = dict(zip(ids, policy.transfers(treated.e_star)))
    log.info("Fee policy: collected %.6g, e*=%s", audit["collected"], treated.e_star)
    return PolicyReport.compare(ids, baseline, treated, budget=audit, fees=fees, transfers=transfers)
