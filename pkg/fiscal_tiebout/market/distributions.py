"""
Piecewise-linear distributions for incomes and housing qualities.

Every measure in the model (income F, district housing Q^j, and the pooled
location-quality measure built from them) is represented by a nondecreasing
piecewise-linear CDF on knots. Repeated x-knots encode atoms, flat stretches
encode gaps in the support.

Responsibilities:
    - PiecewiseLinearCdf: left/right CDF limits, generalized inverse, density
    - DistributionSpec: the user-facing, validated description
      (uniform, piecewise_linear_cdf, point) carrying a total mass
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal, Sequence, Tuple

import numpy as np

KNOT_TOL = 1e-14


class PiecewiseLinearCdf:
    """
    Nondecreasing piecewise-linear function through (xs[i], cs[i]).

    xs is nondecreasing (equal neighbours form an atom of size cs[i+1] - cs[i]),
    cs is nondecreasing with cs[0] = 0.
    """

    def __init__(self, xs: Sequence[float], cs: Sequence[float]):
        xs = np.asarray(xs, dtype=float)
        cs = np.asarray(cs, dtype=float)
        if xs.ndim != 1 or xs.shape != cs.shape or xs.size < 2:
            raise ValueError("Knots must be two equal-length 1-D sequences with at least two points")
        if np.any(np.diff(xs) < 0) or np.any(np.diff(cs) < 0):
            raise ValueError("Knots must be nondecreasing")
        self.xs = xs
        self.cs = cs

    @property
    def lo(self) -> float:
        return float(self.xs[0])

    @property
    def hi(self) -> float:
        return float(self.xs[-1])

    @property
    def mass(self) -> float:
        return float(self.cs[-1])

    def _interp(self, x: np.ndarray, i: np.ndarray) -> np.ndarray:
        n = self.xs.size
        inner = np.clip(i, 1, n - 1)
        x0, x1 = self.xs[inner - 1], self.xs[inner]
        c0, c1 = self.cs[inner - 1], self.cs[inner]
        width = np.where(x1 > x0, x1 - x0, 1.0)
        val = c0 + (c1 - c0) * (x - x0) / width
        val = np.where(i <= 0, self.cs[0], val)
        return np.where(i >= n, self.cs[-1], val)

    def cdf(self, x):
        """Right limit: mass of {<= x}."""
        x = np.asarray(x, dtype=float)
        out = self._interp(x, np.searchsorted(self.xs, x, side="right"))
        return float(out) if out.ndim == 0 else out

    def cdf_left(self, x):
        """Left limit: mass of {< x}."""
        x = np.asarray(x, dtype=float)
        out = self._interp(x, np.searchsorted(self.xs, x, side="left"))
        return float(out) if out.ndim == 0 else out

    def ppf(self, u):
        """Generalized inverse inf{x : cdf(x) >= u} for u in [0, mass]."""
        u = np.asarray(u, dtype=float)
        n = self.cs.size
        i = np.searchsorted(self.cs, u, side="left")
        inner = np.clip(i, 1, n - 1)
        c0, c1 = self.cs[inner - 1], self.cs[inner]
        x0, x1 = self.xs[inner - 1], self.xs[inner]
        width = np.where(c1 > c0, c1 - c0, 1.0)
        val = x0 + (x1 - x0) * (u - c0) / width
        val = np.where(i <= 0, self.xs[0], val)
        val = np.where(i >= n, self.xs[-1], val)
        return float(val) if val.ndim == 0 else val

    def pdf(self, x):
        """Density of the absolutely continuous part (0 outside the support and on atoms)."""
        x = np.asarray(x, dtype=float)
        n = self.xs.size
        i = np.searchsorted(self.xs, x, side="right")
        inner = np.clip(i, 1, n - 1)
        dx = self.xs[inner] - self.xs[inner - 1]
        dc = self.cs[inner] - self.cs[inner - 1]
        dens = np.where(dx > 0, dc / np.where(dx > 0, dx, 1.0), 0.0)
        dens = np.where((i <= 0) | (i >= n), 0.0, dens)
        return float(dens) if dens.ndim == 0 else dens

    def atom(self, x) -> float:
        return float(self.cdf(x) - self.cdf_left(x))

    def shifted(self, delta: float) -> "PiecewiseLinearCdf":
        return PiecewiseLinearCdf(self.xs + delta, self.cs)

    @classmethod
    def pooled(cls, parts: Sequence["PiecewiseLinearCdf"]) -> "PiecewiseLinearCdf":
        """Sum of measures; atoms of the parts become duplicate knots of the sum."""
        points = np.unique(np.concatenate([p.xs for p in parts]))
        xs, cs = [], []
        for x in points:
            left = sum(p.cdf_left(x) for p in parts)
            right = sum(p.cdf(x) for p in parts)
            xs.append(x)
            cs.append(left)
            if right - left > KNOT_TOL:
                xs.append(x)
                cs.append(right)
        cs = np.maximum.accumulate(np.asarray(cs))
        cs[0] = 0.0
        return cls(xs, cs)


@dataclass(frozen=True)
class DistributionSpec:
    """
    Validated description of a distribution with total mass `mass`.

    kind:
        - "uniform": constant density on support=(lo, hi)
        - "piecewise_linear_cdf": knots ((x, share), ...) with shares rising strictly
          from 0 to 1; the CDF is share * mass
        - "point": all mass at support[0] (support[1] must equal support[0])
    """

    kind: Literal["uniform", "piecewise_linear_cdf", "point"] = "uniform"
    support: Tuple[float, float] = (0.0, 1.0)
    knots: Tuple[Tuple[float, float], ...] = field(default_factory=tuple)
    mass: float = 1.0

    def __post_init__(self):
        lo, hi = self.support
        if self.mass <= 0:
            raise ValueError("Distribution mass must be positive")
        if self.kind == "uniform":
            if not hi > lo:
                raise ValueError(f"Uniform support must satisfy lo < hi, got {self.support}")
        elif self.kind == "point":
            if abs(hi - lo) > KNOT_TOL:
                raise ValueError("Point mass needs support (x, x)")
        elif self.kind == "piecewise_linear_cdf":
            if len(self.knots) < 2:
                raise ValueError("piecewise_linear_cdf needs at least two knots")
            xs = np.array([k[0] for k in self.knots], dtype=float)
            us = np.array([k[1] for k in self.knots], dtype=float)
            if np.any(np.diff(xs) <= 0) or np.any(np.diff(us) <= 0):
                raise ValueError("CDF knots must be strictly increasing in x and in cdf")
            if abs(us[0]) > 1e-12 or abs(us[-1] - 1.0) > 1e-12:
                raise ValueError("CDF knot shares must run from 0 to 1")
            if abs(xs[0] - lo) > 1e-12 or abs(xs[-1] - hi) > 1e-12:
                raise ValueError("First and last knots must coincide with the support")
        else:
            raise ValueError(f"Unknown distribution kind: {self.kind!r}")

    @classmethod
    def uniform(cls, lo: float, hi: float, mass: float = 1.0) -> "DistributionSpec":
        return cls(kind="uniform", support=(lo, hi), mass=mass)

    @classmethod
    def point(cls, x: float, mass: float = 1.0) -> "DistributionSpec":
        return cls(kind="point", support=(x, x), mass=mass)

    @classmethod
    def piecewise(cls, knots: Sequence[Tuple[float, float]], mass: float = 1.0) -> "DistributionSpec":
        knots = tuple((float(x), float(u)) for x, u in knots)
        return cls(kind="piecewise_linear_cdf", support=(knots[0][0], knots[-1][0]), knots=knots, mass=mass)

    def with_mass(self, mass: float) -> "DistributionSpec":
        return DistributionSpec(kind=self.kind, support=self.support, knots=self.knots, mass=mass)

    @cached_property
    def curve(self) -> PiecewiseLinearCdf:
        lo, hi = self.support
        if self.kind == "uniform":
            return PiecewiseLinearCdf([lo, hi], [0.0, self.mass])
        if self.kind == "point":
            return PiecewiseLinearCdf([lo, lo], [0.0, self.mass])
        xs = [k[0] for k in self.knots]
        cs = [k[1] * self.mass for k in self.knots]
        return PiecewiseLinearCdf(xs, cs)

    @property
    def lo(self) -> float:
        return float(self.support[0])

    @property
    def hi(self) -> float:
        return float(self.support[1])

    @property
    def is_atomic(self) -> bool:
        return self.kind == "point"

    def cdf(self, x):
        return self.curve.cdf(x)

    def cdf_left(self, x):
        return self.curve.cdf_left(x)

    def ppf(self, u):
        return self.curve.ppf(u)

    def pdf(self, x):
        return self.curve.pdf(x)
