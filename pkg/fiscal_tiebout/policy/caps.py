"""
Expenditure caps.

Capping districts at a common distance delta below equilibrium spending, with
delta no larger than the gap to their fixed-gap optimum, makes every capped
district strictly better off and the others weakly better off whenever their
housing overlaps the capped districts' in location quality.

Period 2 stays at the baseline's stationary horizon in every comparison.
"""

from __future__ import annotations

import logging
from typing import Iterable, Optional

import numpy as np

from ..districts.game import GameSolution, baseline_horizon, evaluate_profile, fixed_gap_profile, nash_equilibrium
from ..districts.horizon import HorizonInputs
from ..errors import NoImprovingCap
from ..market.economy import Economy
from .instruments import CapPolicy, PolicyReport

log = logging.getLogger("fiscal_tiebout.policy")


def _fixed_solution(econ: Economy, e, horizon: HorizonInputs) -> GameSolution:
    values = evaluate_profile(econ, e, horizon)
    return GameSolution(
        e_star=tuple(float(x) for x in e),
        tax_star=tuple(v.tax for v in values),
        objectives=values,
        br_residual=0.0,
        iterations=0,
        trace={"mode": "fixed"},
        horizon=horizon,
        reference_residual=horizon.reference_residual(e),
    )


def solve_capped_equilibrium(
    econ: Economy,
    policy: CapPolicy,
    *,
    baseline: Optional[GameSolution] = None,
    horizon: Optional[HorizonInputs] = None,
    **solver_kwargs,
) -> GameSolution:
    """
    Equilibrium under caps.

    In "fixed" mode capped districts spend min(cap, e*) and everybody else stays at
    e*; caps that do not bind return the baseline itself. In "reoptimize" mode the
    game is solved again with truncated strategy spaces, starting from the capped
    baseline.

    Raises:
        NoConvergence: propagated from the game solver.
    """
    baseline = baseline or nash_equilibrium(econ, horizon=horizon, **solver_kwargs)
    horizon = baseline_horizon(econ, baseline, horizon, nodes=solver_kwargs.get("nodes"))
    caps = policy.resolve(baseline.e_star)
    if all(cap >= baseline.e_star[j] for j, cap in caps.items()):
        return baseline
    capped = policy.capped_profile(baseline.e_star)
    if policy.mode == "fixed":
        return _fixed_solution(econ, capped, horizon)
    return nash_equilibrium(econ, horizon=horizon, initial=capped, caps=caps, **solver_kwargs)


def find_pareto_caps(
    econ: Economy,
    Z: Iterable[int],
    *,
    baseline: Optional[GameSolution] = None,
    horizon: Optional[HorizonInputs] = None,
    n_grid: int = 8,
    **solver_kwargs,
) -> PolicyReport:
    """
    Line search over the common reduction delta in (0, min_{j in Z}(e*_j - e~_j)].

    Returns the report at the delta that maximizes the smallest objective change.
    `details` carries the fixed-gap levels, the chosen delta and the full sweep.

    Raises:
        NoImprovingCap: when the delta range is empty (no wider than the
            baseline solver resolution) or every delta harms some district;
            the exception carries the best report found (if any).
    """
    Z = tuple(sorted(set(Z)))
    if not Z:
        raise ValueError("Target set Z must not be empty")
    ids = [d.id for d in econ.districts]
    baseline = baseline or nash_equilibrium(econ, horizon=horizon, **solver_kwargs)
    horizon = baseline_horizon(econ, baseline, horizon, nodes=solver_kwargs.get("nodes"))
    e_star = np.asarray(baseline.e_star)
    tilde = fixed_gap_profile(econ, e_star, Z, horizon=horizon)
    delta_max = min(e_star[j] - tilde[j] for j in Z)
    common = {"targets": [ids[j] for j in Z], "e_fixed_gap": {ids[j]: tilde[j] for j in Z}, "delta_max": float(delta_max)}

    if delta_max <= baseline.resolution:
        log.warning("No cap reduction available: delta_max=%.3e, solver resolution %.3e", delta_max, baseline.resolution)
        raise NoImprovingCap(
            f"Equilibrium spending does not exceed the fixed-gap optimum by more than the solver resolution "
            f"for every district in Z (delta_max={delta_max:.3e})",
            report=PolicyReport.compare(ids, baseline, baseline, **common, delta=0.0, sweep=[]),
        )

    sweep, best = [], None
    for delta in delta_max * np.arange(1, n_grid + 1) / n_grid:
        policy = CapPolicy(common_reduction=float(delta), targets=Z)
        treated = _fixed_solution(econ, policy.capped_profile(e_star), horizon)
        report = PolicyReport.compare(ids, baseline, treated)
        sweep.append({"delta": float(delta), "min_delta": report.min_delta, "pareto": report.pareto,
                      **{f"delta_{ids[j]}": d for j, d in enumerate(report.objective_delta)}})
        if best is None or report.min_delta > best[1].min_delta:
            best = (float(delta), report)

    delta, report = best
    final = PolicyReport.compare(ids, baseline, report.treated, **common, delta=delta, sweep=sweep)
    if not final.pareto:
        log.warning("No Pareto-improving cap: harmed districts %s", final.harmed)
        raise NoImprovingCap(f"Every tested cap harms some district (best harms {final.harmed})", report=final)
    log.info("Pareto cap found: delta=%.6g gains=%s", delta, np.round(final.objective_delta, 10).tolist())
    return final
