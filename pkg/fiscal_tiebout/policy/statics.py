"""
Comparative statics of PDVs in one district's expenditure.

For every step e_j -> e_j + step, the PDV schedules before and after are
compared on each district's quality grid:

- own district:    m^j weakly falls everywhere; it falls strictly at every
                   home whose new location lies above some other district's
                   lowest location, and does not move below all of them
- other districts: m^k weakly rises everywhere; it rises strictly at every
                   home above j's new lowest location, and does not move at
                   homes below j's old lowest location
- if j's lowest location lies above all of k's (j dominates k) at both
  profiles, m^k does not move at all

Homes between j's old and new lowest location carry no strictness claim.
Rows also carry the first quality at which the change is strict and the
difference quotient (m_hat - m)/step at the top home.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..districts.grid import QualityGrid
from ..market.allocation import assign_locations
from ..market.economy import Economy
from ..market.money_values import money_values

log = logging.getLogger("fiscal_tiebout.policy")

STATICS_TOL = 1e-9
# homes this close to a threshold location are left out of the strict check
THRESHOLD_MARGIN = 1e-6


@dataclass(frozen=True)
class StaticsReport:
    district: int
    rows: List[dict]

    @property
    def passed(self) -> bool:
        return all(r["sign_ok"] and r["equality_ok"] and r["strict_ok"] for r in self.rows)


def classify_case(econ: Economy, j: int, k: int, school: Sequence[float]) -> str:
    """Relation of district j's location qualities to district k's."""
    dj, dk = econ.districts[j].housing, econ.districts[k].housing
    if dj.lo + school[j] >= dk.hi + school[k]:
        return "dominates"
    if dj.hi + school[j] <= dk.lo + school[k]:
        return "dominated"
    return "overlap"


def expected_regions(
    econ: Economy,
    j: int,
    k: int,
    q: np.ndarray,
    school: Sequence[float],
    school_hat: Sequence[float],
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Masks over district k's grid: homes whose PDV must not move, and homes
    whose PDV must move strictly, when j raises spending.
    """
    if k == j:
        others = [econ.districts[i].housing.lo + school[i] for i in range(econ.n) if i != j]
        lowest_other = min(others) if others else np.inf
        location = q + school_hat[j]
        return location <= lowest_other, location > lowest_other + THRESHOLD_MARGIN
    location = q + school[k]
    bottom = econ.districts[j].housing.lo
    return location <= bottom + school[j] - THRESHOLD_MARGIN, location > bottom + school_hat[j] + THRESHOLD_MARGIN


def comparative_statics_audit(
    econ: Economy,
    j: int,
    e: Sequence[float],
    steps: Sequence[float],
    *,
    nodes: int = 201,
) -> StaticsReport:
    """Raise district j's expenditure by each step and check the PDV sign pattern."""
    e = np.asarray(e, dtype=float)
    grids = [QualityGrid.for_housing(d.housing, nodes) for d in econ.districts]
    alloc = assign_locations(econ, e)
    base = money_values(econ, alloc, e)
    m_base = [np.asarray(base.m_by_district(k, grids[k].q), dtype=float) for k in range(econ.n)]

    rows = []
    for step in steps:
        e_hat = e.copy()
        e_hat[j] += step
        alloc_hat = assign_locations(econ, e_hat)
        mvs_hat = money_values(econ, alloc_hat, e_hat)
        for k in range(econ.n):
            q = grids[k].q
            diff = np.asarray(mvs_hat.m_by_district(k, q), dtype=float) - m_base[k]
            before = classify_case(econ, j, k, alloc.school) if k != j else "own"
            after = classify_case(econ, j, k, alloc_hat.school) if k != j else "own"
            if k == j:
                sign_ok = bool(np.all(diff <= STATICS_TOL))
                moved = diff < -STATICS_TOL
            else:
                sign_ok = bool(np.all(diff >= -STATICS_TOL))
                moved = diff > STATICS_TOL
            equality_ok = True
            if before == after == "dominates":
                equality_ok = bool(np.all(np.abs(diff) <= STATICS_TOL))
            fixed, strict_region = expected_regions(econ, j, k, q, alloc.school, alloc_hat.school)
            strict_ok = bool(np.all(np.abs(diff[fixed]) <= STATICS_TOL) and np.all(moved[strict_region]))
            strict = np.flatnonzero(np.abs(diff) > STATICS_TOL)
            rows.append({
                "step": float(step),
                "district": econ.districts[k].id,
                "case": before if before == after else f"{before}->{after}",
                "max_increase": float(np.max(diff)),
                "max_decrease": float(-np.min(diff)),
                "strict_from_q": float(q[strict[0]]) if strict.size else float("nan"),
                "quotient_at_top": float(diff[-1] / step) if step else float("nan"),
                "fixed_nodes": int(np.count_nonzero(fixed)),
                "strict_nodes": int(np.count_nonzero(strict_region)),
                "sign_ok": sign_ok,
                "equality_ok": equality_ok,
                "strict_ok": strict_ok,
            })
    report = StaticsReport(district=j, rows=rows)
    log.info("Comparative statics for %s: %s", econ.districts[j].id, "passed" if report.passed else "FAILED")
    return report
