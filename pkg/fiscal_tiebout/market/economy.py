"""
Scenario value objects: District and Economy.

Both are frozen dataclasses; every solver treats them as read-only snapshots, so
they can be handed to worker processes as-is.

Old-resident wealth w~(q) and renter shares are given either as a constant or as
knots ((q, value), ...) interpolated linearly. Old wealth may also be left as
None, meaning "stationary": the incumbent at q is the type that the reference
equilibrium assigns to q (see districts.horizon).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..econ.savings import value_in_money
from ..econ.utility import UtilitySpec
from ..errors import MassMismatch
from .distributions import DistributionSpec
from .technology import BaseTechnology, LogTechnology

log = logging.getLogger("fiscal_tiebout.market")

MASS_TOL = 1e-12

Schedule = Union[float, Tuple[Tuple[float, float], ...]]


def evaluate_schedule(schedule: Schedule, q):
    """Constant or linearly interpolated knots, evaluated at q."""
    q = np.asarray(q, dtype=float)
    if isinstance(schedule, (int, float)):
        out = np.full(q.shape, float(schedule))
    else:
        xs = np.array([k[0] for k in schedule], dtype=float)
        ys = np.array([k[1] for k in schedule], dtype=float)
        out = np.interp(q, xs, ys)
    return float(out) if out.ndim == 0 else out


def _normalize_schedule(schedule) -> Schedule:
    if schedule is None:
        return None
    if isinstance(schedule, (int, float)):
        return float(schedule)
    knots = tuple(sorted((float(x), float(y)) for x, y in schedule))
    if len(knots) < 1:
        raise ValueError("Schedule knots must not be empty")
    return knots


@dataclass(frozen=True)
class District:
    """
    One jurisdiction: housing stock, incumbents and its school-technology multiplier.

    Attributes:
        id: label used in reports.
        housing: quality measure Q^j on [0, 1] with mass 1/N.
        old_wealth: w~(q); None selects the stationary default.
        renter_share: fraction of homes at q that are rented, in [0, 1].
        s_scale: multiplier on the common technology s(e).
    """

    id: str
    housing: DistributionSpec
    old_wealth: Optional[Schedule] = None
    renter_share: Schedule = 0.0
    s_scale: float = 1.0

    def __post_init__(self):
        if self.housing.lo < -1e-12 or self.housing.hi > 1.0 + 1e-12:
            raise ValueError(f"District {self.id}: housing quality must lie in [0, 1]")
        if self.s_scale <= 0:
            raise ValueError(f"District {self.id}: s_scale must be positive")
        object.__setattr__(self, "old_wealth", _normalize_schedule(self.old_wealth))
        object.__setattr__(self, "renter_share", _normalize_schedule(self.renter_share))
        shares = np.atleast_1d(
            self.renter_share if isinstance(self.renter_share, float) else [k[1] for k in self.renter_share]
        )
        if np.any(shares < 0) or np.any(shares > 1):
            raise ValueError(f"District {self.id}: renter share must lie in [0, 1]")

    @property
    def mass(self) -> float:
        return self.housing.mass

    def renters_at(self, q):
        return evaluate_schedule(self.renter_share, q)

    def old_wealth_at(self, q):
        if self.old_wealth is None:
            raise ValueError(f"District {self.id}: stationary old wealth needs a reference equilibrium")
        return evaluate_schedule(self.old_wealth, q)

    @property
    def all_renters(self) -> bool:
        if isinstance(self.renter_share, float):
            return self.renter_share >= 1.0
        return all(k[1] >= 1.0 for k in self.renter_share)


@dataclass(frozen=True)
class Economy:
    """
    Full scenario.

    Exactly one of `outside_money_value` (M at the poorest type) and
    `outside_pdv` (PDV held by the poorest type) is used; the PDV form is
    converted with V(w_min, m).
    """

    districts: Tuple[District, ...]
    income: DistributionSpec = field(default_factory=lambda: DistributionSpec.uniform(5.0, 15.0))
    utility: UtilitySpec = field(default_factory=UtilitySpec)
    r: float = 0.05
    technology: BaseTechnology = field(default_factory=LogTechnology)
    theta: float = 0.5
    outside_money_value: Optional[float] = None
    outside_pdv: Optional[float] = 0.0

    def __post_init__(self):
        object.__setattr__(self, "districts", tuple(self.districts))
        if not self.districts:
            raise ValueError("Economy needs at least one district")
        ids = [d.id for d in self.districts]
        if len(set(ids)) != len(ids):
            raise ValueError("District ids must be unique")
        if 1.0 + self.r <= 0:
            raise ValueError("Interest rate must satisfy 1 + r > 0")
        if self.theta < 0:
            raise ValueError("theta must be nonnegative")
        if self.income.is_atomic:
            raise ValueError("Income distribution must be continuous")
        if self.outside_money_value is None and self.outside_pdv is None:
            raise ValueError("Provide outside_money_value or outside_pdv")

    # ------------------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.districts)

    def index(self, district_id: str) -> int:
        for j, d in enumerate(self.districts):
            if d.id == district_id:
                return j
        raise KeyError(district_id)

    @property
    def w_min(self) -> float:
        return self.income.lo

    @property
    def w_max(self) -> float:
        return self.income.hi

    @property
    def lower_money_value(self) -> float:
        """M at the poorest type."""
        if self.outside_money_value is not None:
            return float(self.outside_money_value)
        return float(value_in_money(self.w_min, self.outside_pdv, self.r, self.utility))

    def school_quality(self, j: int, e):
        return self.districts[j].s_scale * self.technology.value(e)

    def school_marginal(self, j: int, e):
        return self.districts[j].s_scale * self.technology.marginal(e)

    def school_profile(self, e: Sequence[float]) -> np.ndarray:
        return np.array([self.school_quality(j, e[j]) for j in range(self.n)], dtype=float)

    def expenditure_for_quality(self, j: int, s: float) -> float:
        return float(self.technology.inverse(s / self.districts[j].s_scale))

    def check_masses(self) -> None:
        """
        Raises:
            MassMismatch: if total housing mass differs from the population mass.
        """
        housing = sum(d.mass for d in self.districts)
        if abs(housing - self.income.mass) > MASS_TOL:
            raise MassMismatch(f"Housing mass {housing!r} differs from population mass {self.income.mass!r}")

    def replace(self, **changes) -> "Economy":
        return replace(self, **changes)

    def with_district(self, j: int, **changes) -> "Economy":
        districts = list(self.districts)
        districts[j] = replace(districts[j], **changes)
        return replace(self, districts=tuple(districts))
