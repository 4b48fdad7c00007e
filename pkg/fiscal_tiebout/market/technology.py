"""
School-quality technologies s(e) for fiscal_tiebout.

Provided technologies:
- LogTechnology:   s(e) = alpha * ln(1 + e)
- PowerTechnology: s(e) = alpha * e**beta, beta in (0, 1)

Both are increasing and concave with s'(e) -> 0 as e -> inf, which is what the
existence argument for district equilibria needs.

Common helpers:
- value / marginal / inverse work on scalars and numpy arrays
- marginal_bound(threshold): smallest e with s'(e) <= threshold, used to cap
  best-response search intervals

Configuration:
- Scenario block `[economy.technology]` with `kind = "log" | "power"` and parameters.
  Aliases are accepted through TECHNOLOGY_REGISTRY (e.g. "ln", "cobb-douglas").

Notes:
- Technologies are immutable value objects; they are shared freely across
  worker processes in parallel sweeps.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Optional, Type

import numpy as np


class BaseTechnology(ABC):
    """Abstract base for school technologies."""

    @abstractmethod
    def value(self, e):  # pragma: no cover
        """s(e) for e >= 0."""
        raise NotImplementedError

    @abstractmethod
    def marginal(self, e):  # pragma: no cover
        """s'(e)."""
        raise NotImplementedError

    @abstractmethod
    def inverse(self, s):  # pragma: no cover
        """e with s(e) = s; negative school quality maps to nan."""
        raise NotImplementedError

    @abstractmethod
    def marginal_bound(self, threshold: float) -> float:  # pragma: no cover
        """Smallest e with s'(e) <= threshold."""
        raise NotImplementedError


@dataclass(frozen=True)
class LogTechnology(BaseTechnology):
    alpha: float = 0.1

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("Technology scale alpha must be positive")

    def value(self, e):
        return self.alpha * np.log1p(np.maximum(e, 0.0))

    def marginal(self, e):
        return self.alpha / (1.0 + np.maximum(e, 0.0))

    def inverse(self, s):
        s = np.asarray(s, dtype=float)
        out = np.where(s >= 0, np.expm1(s / self.alpha), np.nan)
        return float(out) if out.ndim == 0 else out

    def marginal_bound(self, threshold: float) -> float:
        return max(0.0, self.alpha / threshold - 1.0)


@dataclass(frozen=True)
class PowerTechnology(BaseTechnology):
    alpha: float = 0.1
    beta: float = 0.5

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("Technology scale alpha must be positive")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("Power technology needs beta in (0, 1)")

    def value(self, e):
        return self.alpha * np.maximum(e, 0.0) ** self.beta

    def marginal(self, e):
        e = np.maximum(e, 1e-300)
        return self.alpha * self.beta * e ** (self.beta - 1.0)

    def inverse(self, s):
        s = np.asarray(s, dtype=float)
        out = np.where(s >= 0, (np.maximum(s, 0.0) / self.alpha) ** (1.0 / self.beta), np.nan)
        return float(out) if out.ndim == 0 else out

    def marginal_bound(self, threshold: float) -> float:
        return (threshold / (self.alpha * self.beta)) ** (1.0 / (self.beta - 1.0))


# Technology registry and factory
TECHNOLOGY_REGISTRY: Dict[str, Type[BaseTechnology]] = {
    "log": LogTechnology,
    "ln": LogTechnology,
    "logarithmic": LogTechnology,
    "power": PowerTechnology,
    "pow": PowerTechnology,
    "cobb-douglas": PowerTechnology,
}


def get_technology(kind: Optional[str] = None, **params: Any) -> BaseTechnology:
    """
    Resolve a technology by registry key (default "log") and construct it.

    Raises:
        ValueError: on an unknown key or invalid parameters.
    """
    key = (kind or "log").strip().lower()
    cls = TECHNOLOGY_REGISTRY.get(key)
    if cls is None:
        raise ValueError(f"Unknown school technology: {kind!r}")
    return cls(**params)
