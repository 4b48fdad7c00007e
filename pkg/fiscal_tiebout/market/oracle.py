"""
Discrete competitive-equilibrium oracle.

n agents (income quantiles) and n homes (quality quantiles of every district)
are matched by ascending type to ascending location quality. Prices follow
from indifference of the boundary type between consecutive homes, starting
from a virtual bottom home that carries the outside money value.

This is a brute-force benchmark for the continuous allocation and envelope
solution; its error shrinks like 1/n**2 away from dominance gaps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..econ.savings import invert_value_in_money, value_in_money
from .economy import Economy

log = logging.getLogger("fiscal_tiebout.market")


@dataclass(frozen=True)
class DiscreteEquilibrium:
    types: np.ndarray          # agent incomes, ascending
    district: np.ndarray       # district index of each agent's home
    quality: np.ndarray        # house quality of each agent's home
    location: np.ndarray       # quality + school quality
    m: np.ndarray              # PDV of each agent's bundle
    boundaries: np.ndarray     # indifferent types between consecutive homes

    def first_type_in(self, j: int) -> float:
        idx = np.flatnonzero(self.district == j)
        return float(self.types[idx[0]]) if idx.size else float("nan")

    def last_type_in(self, j: int) -> float:
        idx = np.flatnonzero(self.district == j)
        return float(self.types[idx[-1]]) if idx.size else float("nan")


def _home_counts(n: int, masses: Sequence[float]) -> np.ndarray:
    """Largest-remainder split of n homes by district mass."""
    masses = np.asarray(masses, dtype=float)
    raw = n * masses / masses.sum()
    counts = np.floor(raw).astype(int)
    for k in np.argsort(-(raw - counts), kind="stable")[: n - counts.sum()]:
        counts[k] += 1
    return counts


def discrete_equilibrium(econ: Economy, e: Sequence[float], n: int = 200) -> DiscreteEquilibrium:
    """Brute-force monotone equilibrium with n agents and n homes."""
    if n < 2:
        raise ValueError("Oracle needs at least two agents")
    econ.check_masses()
    school = econ.school_profile(np.asarray(e, dtype=float))
    F = econ.income.curve
    total = F.mass

    types = np.asarray(F.ppf((np.arange(n) + 0.5) / n * total), dtype=float)
    boundaries = np.asarray(F.ppf(np.arange(n) / n * total), dtype=float)

    counts = _home_counts(n, [d.mass for d in econ.districts])
    home_district, home_quality = [], []
    for j, (d, n_j) in enumerate(zip(econ.districts, counts)):
        q = np.atleast_1d(d.housing.ppf((np.arange(n_j) + 0.5) / n_j * d.mass))
        home_district.extend([j] * n_j)
        home_quality.extend(q.tolist())
    home_district = np.asarray(home_district)
    home_quality = np.asarray(home_quality, dtype=float)
    home_location = home_quality + school[home_district]
    order = np.argsort(home_location, kind="stable")

    district = home_district[order]
    quality = home_quality[order]
    location = home_location[order]

    u, r = econ.utility, econ.r
    bottom_location = min(d.housing.lo + school[j] for j, d in enumerate(econ.districts))
    m_prev = invert_value_in_money(econ.w_min, econ.lower_money_value, r, u)
    ell_prev = bottom_location
    m = np.empty(n)
    for k in range(n):
        w_b = boundaries[k]
        target = ell_prev + float(value_in_money(w_b, m_prev, r, u)) - location[k]
        m[k] = invert_value_in_money(w_b, target, r, u)
        m_prev, ell_prev = m[k], location[k]

    log.debug("discrete oracle: n=%d homes per district=%s", n, counts.tolist())
    return DiscreteEquilibrium(
        types=types, district=district, quality=quality, location=location, m=m, boundaries=boundaries
    )
