"""
The expenditure game between districts.

Responsibilities:
    - best_response: district j's optimal expenditure given everyone else's
    - nash_equilibrium: damped Jacobi best-response iteration with a trace,
      optional worker pool, caps and held-fixed districts, and a multi-start
      multiplicity check
    - fixed_gap_best_response: the benchmark problem in which a set of districts
      co-moves with j in school quality, so that (for the full set) the PDVs
      m(q) stay at their equilibrium values

Design notes:
    - Without an explicit horizon, period 2 is the stationary horizon at the
      current iterate, so a converged profile e* satisfies e* = BR(e*) with
      period-2 policy and resale prices taken from e* itself.
    - The search interval is [0, e_max] with e_max the smaller of the point where
      theta * s'(e) falls below 1e-4 u'(C) (C the largest reference owner
      consumption) and the owners' total resources.
    - Best responses at one profile are independent, so they can be computed in
      parallel; the order of results never depends on the worker count.
    - Owner objectives have a convex kink where two districts' lowest location
      qualities tie: away from the tie the lower district alone houses the
      poorest types, whose money value is pinned at M(w_lo), and every PDV
      above them drops in proportion to the gap. Identical districts therefore
      have no symmetric interior equilibrium; best responses jump across the
      tie and the iteration alternates. A persistent 2-cycle stops the
      iteration early instead of running to max_iter. Renters see the same
      kink with the opposite sign, so identical renter districts can rest at
      equal spending.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..config import settings
from ..diagnostics.base import BaseTrace
from ..diagnostics.trace import SolverTrace
from ..errors import NoConvergence
from ..market.allocation import assign_by_quality, assign_locations
from ..market.economy import Economy
from ..market.money_values import money_values
from .grid import DEFAULT_NODES
from .horizon import HorizonInputs, stationary_horizon
from .objective import BudgetRule, DistrictObjectiveValue, objective_from_pdvs, objective_with_prices, own_expenditure
from .search import maximize_bounded
from .taxes import TaxSchedule

log = logging.getLogger("fiscal_tiebout.districts")

INADA_FACTOR = 1e-4
# consecutive cycling iterations before the iteration gives up
CYCLE_WINDOW = 10


@dataclass(frozen=True)
class GameSolution:
    e_star: Tuple[float, ...]
    tax_star: Tuple[TaxSchedule, ...]
    objectives: Tuple[DistrictObjectiveValue, ...]
    br_residual: float
    iterations: int
    trace: dict = field(default_factory=dict)
    multiple_equilibria: bool = False
    alternatives: Tuple[Tuple[float, ...], ...] = ()
    horizon: Optional[HorizonInputs] = None
    reference_residual: float = 0.0
    xatol: float = 1e-9

    @property
    def totals(self) -> Tuple[float, ...]:
        return tuple(v.total for v in self.objectives)

    @property
    def resolution(self) -> float:
        """Spending differences up to this size are within solver error of e*."""
        return self.br_residual + 2.0 * self.xatol


# ---------------------------------------------------------------------------
# Search bounds
# ---------------------------------------------------------------------------
def expenditure_bound(econ: Economy, j: int, horizon: HorizonInputs) -> float:
    """e_max for district j."""
    if econ.theta <= 0:
        return 0.0
    h = horizon[j]
    d = econ.districts[j]
    base = h.old_wealth + h.p2 / (1.0 + econ.r) - h.m_ref
    C = float(np.max(base)) if np.max(base) > 0 else float(np.max(h.old_wealth))
    threshold = INADA_FACTOR * float(econ.utility.marginal(C)) / (econ.theta * d.s_scale)
    bound = float(econ.technology.marginal_bound(threshold))
    if not d.all_renters:
        share = np.broadcast_to(np.asarray(d.renters_at(h.grid.q), dtype=float), h.grid.q.shape)
        capacity = h.grid.integrate(np.where(share < 1.0, base, 0.0))
        bound = min(bound, max(capacity, 0.0))
    return bound


def _with(e: Sequence[float], j: int, x: float) -> np.ndarray:
    out = np.array(e, dtype=float)
    out[j] = x
    return out


# ---------------------------------------------------------------------------
# Best responses
# ---------------------------------------------------------------------------
def best_response(
    econ: Economy,
    j: int,
    e: Sequence[float],
    *,
    horizon: Optional[HorizonInputs] = None,
    budget: BudgetRule = own_expenditure,
    upper: Optional[float] = None,
    xatol: float = 1e-9,
) -> float:
    """
    argmax over e_j in [0, min(e_max, upper)] of Pi^j, others at e.

    `e` is a full profile; its j-th entry only enters through the default
    horizon, which is the stationary one at e.
    """
    horizon = horizon or stationary_horizon(econ, e)
    hi = expenditure_bound(econ, j, horizon)
    if upper is not None:
        hi = min(hi, max(upper, 0.0))
    if hi <= 0:
        return 0.0

    def f(x: float) -> float:
        profile = _with(e, j, x)
        alloc = assign_locations(econ, profile)
        mvs = money_values(econ, alloc, profile)
        return objective_with_prices(econ, j, profile, mvs, horizon, budget).total

    x, _ = maximize_bounded(f, 0.0, hi, xatol=xatol)
    return x


def _best_response_task(args, econ, horizon, budget, caps, xatol):
    j, e = args
    return best_response(econ, j, e, horizon=horizon, budget=budget, upper=caps.get(j), xatol=xatol)


def _map(fn, items: List, workers: int) -> List:
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Equilibrium
# ---------------------------------------------------------------------------
def evaluate_profile(
    econ: Economy,
    e: Sequence[float],
    horizon: HorizonInputs,
    budget: BudgetRule = own_expenditure,
) -> Tuple[DistrictObjectiveValue, ...]:
    """All district objectives (with tax schedules) at one profile."""
    e = np.asarray(e, dtype=float)
    alloc = assign_locations(econ, e)
    mvs = money_values(econ, alloc, e)
    return tuple(objective_with_prices(econ, j, e, mvs, horizon, budget) for j in range(econ.n))


def _iterate(
    econ: Economy,
    start: np.ndarray,
    horizon_at: Callable[[np.ndarray], HorizonInputs],
    budget: BudgetRule,
    caps: Mapping[int, float],
    fixed: Iterable[int],
    damping: float,
    tol: float,
    max_iter: int,
    workers: int,
    trace: BaseTrace,
    xatol: float,
) -> Tuple[np.ndarray, float, int, HorizonInputs]:
    fixed = set(fixed)
    movers = [j for j in range(econ.n) if j not in fixed]
    e = start.copy()
    for it in range(1, max_iter + 1):
        horizon = horizon_at(e)
        task = partial(_best_response_task, econ=econ, horizon=horizon, budget=budget, caps=dict(caps), xatol=xatol)
        br = e.copy()
        br[movers] = _map(task, [(j, e.copy()) for j in movers], workers)
        change = float(np.max(np.abs(br - e))) if movers else 0.0
        trace.log_event(it, e, change)
        log.debug("iteration %d: e=%s change=%.3e", it, np.round(e, 10).tolist(), change)
        if change <= tol:
            return e, change, it, horizon
        if trace.persistent_cycle(CYCLE_WINDOW):
            raise NoConvergence(
                f"Best responses alternate between two profiles (change {change:.3e} after {it} iterations); "
                "spending levels straddle a tie in location quality",
                trace=trace.summary(),
            )
        e = (1.0 - damping) * e + damping * br
    raise NoConvergence(
        f"Best-response iteration did not converge in {max_iter} iterations (last change {change:.3e})",
        trace=trace.summary(),
    )


def nash_equilibrium(
    econ: Economy,
    *,
    horizon: Optional[HorizonInputs] = None,
    initial: Optional[Sequence[float]] = None,
    damping: float = 0.5,
    tol: float = 1e-6,
    max_iter: int = 500,
    workers: Optional[int] = None,
    budget: BudgetRule = own_expenditure,
    caps: Optional[Mapping[int, float]] = None,
    fixed: Iterable[int] = (),
    starts: Sequence[Sequence[float]] = (),
    trace: Optional[BaseTrace] = None,
    xatol: float = 1e-9,
    nodes: int = DEFAULT_NODES,
) -> GameSolution:
    """
    Damped best-response iteration e <- (1 - damping) e + damping BR(e).

    Args:
        horizon: period-2 inputs held fixed during the iteration. None (the
            default) rebuilds the stationary horizon at every iterate, so the
            solution's reference profile is e* itself.
        initial: starting profile (default zeros); held-fixed districts keep their
            initial values throughout.
        caps: per-district upper bounds on expenditure.
        fixed: districts that do not re-optimize.
        starts: extra starting profiles for the multiplicity check.
        nodes: quadrature nodes of the stationary horizon.

    Raises:
        NoConvergence: when max_iter is reached or the iteration settles into a
            2-cycle; `trace` carries the summary.
    """
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must lie in (0, 1]")
    fixed = tuple(fixed)
    if horizon is None:
        horizon_at = partial(stationary_horizon, econ, nodes=nodes)
    else:
        def horizon_at(_e):
            return horizon
    workers = settings.WORKERS if workers is None else max(1, int(workers))
    trace = trace if trace is not None else SolverTrace(tolerance=tol)
    caps = dict(caps or {})
    start = np.zeros(econ.n) if initial is None else np.asarray(initial, dtype=float).copy()
    for j, cap in caps.items():
        if j not in fixed:
            start[j] = min(start[j], cap)

    e, residual, iterations, used = _iterate(
        econ, start, horizon_at, budget, caps, fixed, damping, tol, max_iter, workers, trace, xatol
    )

    alternatives: List[Tuple[float, ...]] = []
    multiple = False
    for s in starts:
        other, _, _, _ = _iterate(
            econ, np.asarray(s, dtype=float), horizon_at, budget, caps, fixed, damping, tol, max_iter, workers,
            SolverTrace(tolerance=tol), xatol,
        )
        alternatives.append(tuple(float(x) for x in other))
        if np.max(np.abs(other - e)) > 10 * tol:
            multiple = True
    if multiple:
        log.warning("Distinct equilibria reached from different starting profiles: %s", alternatives)

    values = evaluate_profile(econ, e, used, budget)
    reference_residual = used.reference_residual(e)
    log.info("Nash equilibrium after %d iterations: e*=%s residual=%.3e reference residual=%.3e",
             iterations, np.round(e, 8).tolist(), residual, reference_residual)
    return GameSolution(
        e_star=tuple(float(x) for x in e),
        tax_star=tuple(v.tax for v in values),
        objectives=values,
        br_residual=residual,
        iterations=iterations,
        trace={**trace.summary(), "reference_residual": reference_residual},
        multiple_equilibria=multiple,
        alternatives=tuple(alternatives),
        horizon=used,
        reference_residual=reference_residual,
        xatol=xatol,
    )


# ---------------------------------------------------------------------------
# Fixed-gap benchmark
# ---------------------------------------------------------------------------
def fixed_gap_best_response(
    econ: Economy,
    j: int,
    Z: Optional[Iterable[int]],
    e_star: Sequence[float],
    *,
    horizon: Optional[HorizonInputs] = None,
    budget: BudgetRule = own_expenditure,
    xatol: float = 1e-9,
) -> float:
    """
    District j's optimum when the districts in Z keep their school-quality gaps to j.

    Z = None means every other district, in which case the allocation and the
    PDVs m(q) are frozen at their values under e_star. The default horizon is
    the stationary one at e_star.
    """
    horizon = horizon or stationary_horizon(econ, e_star)
    e_star = np.asarray(e_star, dtype=float)
    movers = set(range(econ.n)) - {j} if Z is None else set(Z) - {j}
    h = horizon[j]
    hi = expenditure_bound(econ, j, horizon)
    if hi <= 0:
        return 0.0

    if len(movers) == econ.n - 1:
        alloc = assign_locations(econ, e_star)
        m_frozen = money_values(econ, alloc, e_star).m_by_district(j, h.grid.q)

        def f(x: float) -> float:
            return objective_from_pdvs(econ, j, x, m_frozen, h, budget(j, _with(e_star, j, x))).total

    else:
        s_star = econ.school_profile(e_star)
        group = sorted(movers | {j})

        def f(x: float) -> float:
            s = s_star.copy()
            s[group] += econ.school_quality(j, x) - s_star[j]
            alloc = assign_by_quality(econ, s)
            m_nodes = money_values(econ, alloc).m_by_district(j, h.grid.q)
            return objective_from_pdvs(econ, j, x, m_nodes, h, budget(j, _with(e_star, j, x))).total

    x, _ = maximize_bounded(f, 0.0, hi, xatol=xatol)
    return x


def fixed_gap_profile(
    econ: Economy,
    e_star: Sequence[float],
    Z: Optional[Iterable[int]] = None,
    *,
    horizon: Optional[HorizonInputs] = None,
    budget: BudgetRule = own_expenditure,
) -> Dict[int, float]:
    """fixed_gap_best_response for every district in Z (default: all)."""
    horizon = horizon or stationary_horizon(econ, e_star)
    targets = range(econ.n) if Z is None else sorted(set(Z))
    out = {}
    for j in targets:
        others = None if Z is None else set(Z) - {j}
        out[j] = fixed_gap_best_response(econ, j, others, e_star, horizon=horizon, budget=budget)
    return out


def baseline_horizon(
    econ: Economy,
    baseline: GameSolution,
    horizon: Optional[HorizonInputs] = None,
    *,
    nodes: Optional[int] = None,
) -> HorizonInputs:
    """Period-2 inputs that policy comparisons hold fixed: `horizon`, else the baseline's own."""
    if horizon is not None:
        return horizon
    if baseline.horizon is not None:
        return baseline.horizon
    return stationary_horizon(econ, baseline.e_star, nodes=nodes or DEFAULT_NODES)
