"""
Period utility families.

Only the two homothetic families used by the model are provided: log and CRRA.
Both are strictly increasing and strictly concave with u'(c) -> inf as c -> 0+.
All methods accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

# Protects arithmetic only; the Inada condition keeps optima away from zero.
CONSUMPTION_FLOOR = 1e-12


@dataclass(frozen=True)
class UtilitySpec:
    """u(c) = ln c (kind="log") or c**(1-gamma)/(1-gamma) (kind="crra", gamma != 1)."""

    kind: Literal["log", "crra"] = "log"
    gamma: float = 2.0

    def __post_init__(self):
        if self.kind not in ("log", "crra"):
            raise ValueError(f"Unknown utility kind: {self.kind!r}")
        if self.kind == "crra" and (self.gamma <= 0 or abs(self.gamma - 1.0) < 1e-12):
            raise ValueError("CRRA curvature must be positive and different from 1")

    @property
    def curvature(self) -> float:
        return 1.0 if self.kind == "log" else float(self.gamma)

    def u(self, c):
        c = np.maximum(c, CONSUMPTION_FLOOR)
        if self.kind == "log":
            return np.log(c)
        return c ** (1.0 - self.gamma) / (1.0 - self.gamma)

    def marginal(self, c):
        c = np.maximum(c, CONSUMPTION_FLOOR)
        return c ** (-self.curvature)

    def inverse_marginal(self, y):
        """c such that u'(c) = y (y > 0)."""
        return np.asarray(y, dtype=float) ** (-1.0 / self.curvature)

    # ------------------------------------------------------------------
    # Optimal two-period split of lifetime wealth X = c1 + c2/(1+r)
    # ------------------------------------------------------------------
    def growth_factor(self, r: float) -> float:
        """Euler ratio c2/c1 = (1+r)**(1/gamma) at the optimum."""
        return (1.0 + r) ** (1.0 / self.curvature)

    def first_period_share(self, r: float) -> float:
        """D with c1 = X / D."""
        return 1.0 + self.growth_factor(r) / (1.0 + r)

    def lifetime_value(self, X, r: float):
        """max u(c1) + u(c2) s.t. c1 + c2/(1+r) = X; -inf where X <= 0."""
        X = np.asarray(X, dtype=float)
        k = self.growth_factor(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            c1 = X / self.first_period_share(r)
            if self.kind == "log":
                val = 2.0 * np.log(c1) + np.log(k)
            else:
                val = c1 ** (1.0 - self.gamma) * (1.0 + k ** (1.0 - self.gamma)) / (1.0 - self.gamma)
        return np.where(X > 0, val, -np.inf)

    def lifetime_marginal(self, X, r: float):
        """d lifetime_value / dX = u'(c1)."""
        X = np.asarray(X, dtype=float)
        return self.marginal(X / self.first_period_share(r))

    def lifetime_wealth(self, target, r: float):
        """Inverse of lifetime_value; nan where the target is out of range."""
        target = np.asarray(target, dtype=float)
        k = self.growth_factor(r)
        D = self.first_period_share(r)
        with np.errstate(invalid="ignore", over="ignore"):
            if self.kind == "log":
                c1 = np.exp((target - np.log(k)) / 2.0)
            else:
                base = target * (1.0 - self.gamma) / (1.0 + k ** (1.0 - self.gamma))
                c1 = np.where(base > 0, base, np.nan) ** (1.0 / (1.0 - self.gamma))
        return c1 * D
