"""Quadrature over a district's housing measure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..market.distributions import DistributionSpec

DEFAULT_NODES = 401


@dataclass(frozen=True)
class QualityGrid:
    """
    Trapezoid rule on equally spaced mass quantiles of Q^j.

    sum(weights * f(q)) approximates the integral of f dQ^j; weights sum to the
    district's housing mass. Point masses collapse to repeated nodes.
    """

    q: np.ndarray
    weights: np.ndarray

    @classmethod
    def for_housing(cls, housing: DistributionSpec, n: int = DEFAULT_NODES) -> "QualityGrid":
        if n < 2:
            raise ValueError("Quality grid needs at least two nodes")
        u = np.linspace(0.0, housing.mass, n)
        q = np.asarray(housing.ppf(u), dtype=float)
        weights = np.full(n, housing.mass / (n - 1))
        weights[0] *= 0.5
        weights[-1] *= 0.5
        return cls(q=q, weights=weights)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))
