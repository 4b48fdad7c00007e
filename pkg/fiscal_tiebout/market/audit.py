"""
Incentive-compatibility audit of a priced allocation.

Samples pairs (w, w') and districts j and checks that type w does not strictly
prefer the house of district j that type w' would occupy:

    l(w) + V(w, m(w)) >= q^j(w') + s_j + V(w, m^j(q^j(w'))) - tol
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..econ.savings import value_in_money
from .allocation import Allocation
from .economy import Economy
from .money_values import MoneyValueSolution

log = logging.getLogger("fiscal_tiebout.market")


@dataclass(frozen=True)
class IcReport:
    max_violation: float
    n_checked: int
    worst: Optional[Tuple[float, float, str]]
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "max_violation": self.max_violation,
            "n_checked": self.n_checked,
            "worst_w": self.worst[0] if self.worst else None,
            "worst_w_prime": self.worst[1] if self.worst else None,
            "worst_district": self.worst[2] if self.worst else None,
            "passed": self.passed,
        }


def ic_audit(
    econ: Economy,
    alloc: Allocation,
    mvs: MoneyValueSolution,
    sample_size: int = 10_000,
    *,
    seed: int = 0,
    tol: float = 1e-6,
) -> IcReport:
    """
    Largest gain any sampled type gets from moving into another type's house.

    A negative or zero violation means nobody wants to deviate. Sampling is
    deterministic for a given seed.
    """
    rng = np.random.default_rng(seed)
    w = rng.uniform(econ.w_min, econ.w_max, sample_size)
    w_dev = rng.uniform(econ.w_min, econ.w_max, sample_size)
    districts = rng.integers(0, econ.n, sample_size)

    own = alloc.location(w) + value_in_money(w, mvs.m(w), econ.r, econ.utility)

    best = -np.inf
    worst = None
    for j in range(econ.n):
        mask = districts == j
        if not np.any(mask):
            continue
        q = np.atleast_1d(alloc.house_choice(j, w_dev[mask]))
        other = mvs.value_at(w[mask], j, q)
        gap = other - own[mask]
        k = int(np.argmax(gap))
        if gap[k] > best:
            best = float(gap[k])
            worst = (float(w[mask][k]), float(w_dev[mask][k]), econ.districts[j].id)

    report = IcReport(max_violation=max(best, 0.0), n_checked=int(sample_size), worst=worst, tolerance=tol)
    log.debug("IC audit: max violation %.3e over %d deviations", report.max_violation, sample_size)
    return report
