"""
Policy instruments and their reports.

- CapPolicy: upper bounds on district expenditure, either explicit or as a
  common reduction delta below equilibrium spending for a target set Z
- FeePolicy: a tax-on-tax; spending above a threshold costs (1 + fee_rate) per
  unit and the collected fees are handed to districts by fixed weights. It is
  used directly as the districts' budget rule.
- PolicyReport: baseline vs treated equilibrium with per-district objective deltas
- RentalOutcome: stationary rents on one district's quality grid
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Literal, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..districts.game import GameSolution

PARETO_SLACK = 1e-9


@dataclass(frozen=True)
class CapPolicy:
    """
    Attributes:
        caps: explicit caps by district index.
        common_reduction: delta; caps e*_j - delta for every j in targets.
        targets: the set Z the common reduction applies to.
        mode: "fixed" evaluates the capped profile with everybody else at e*;
            "reoptimize" re-solves the game under the caps.
    """

    caps: Mapping[int, float] = field(default_factory=dict)
    common_reduction: Optional[float] = None
    targets: Tuple[int, ...] = ()
    mode: Literal["fixed", "reoptimize"] = "fixed"

    def __post_init__(self):
        if any(c < 0 for c in self.caps.values()):
            raise ValueError("Caps must be nonnegative")
        if self.common_reduction is not None and self.common_reduction < 0:
            raise ValueError("Common reduction must be nonnegative")
        if self.mode not in ("fixed", "reoptimize"):
            raise ValueError(f"Unknown cap mode: {self.mode!r}")
        object.__setattr__(self, "caps", dict(self.caps))
        object.__setattr__(self, "targets", tuple(sorted(self.targets)))

    def resolve(self, e_star: Sequence[float]) -> Dict[int, float]:
        """Caps by district index for a baseline profile."""
        out = dict(self.caps)
        if self.common_reduction is not None:
            for j in self.targets:
                out[j] = max(0.0, float(e_star[j]) - self.common_reduction)
        return out

    def capped_profile(self, e_star: Sequence[float]) -> np.ndarray:
        e = np.array(e_star, dtype=float)
        for j, cap in self.resolve(e_star).items():
            e[j] = min(e[j], cap)
        return e


@dataclass(frozen=True)
class FeePolicy:
    threshold: Tuple[float, ...]
    fee_rate: float
    transfer_weights: Tuple[float, ...]

    def __post_init__(self):
        if not 0.0 <= self.fee_rate <= 1.0:
            raise ValueError("fee_rate must lie in [0, 1]")
        weights = np.asarray(self.transfer_weights, dtype=float)
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("Transfer weights must be nonnegative and sum to 1")
        if len(self.threshold) != len(self.transfer_weights):
            raise ValueError("threshold and transfer_weights need one entry per district")
        object.__setattr__(self, "threshold", tuple(float(x) for x in self.threshold))
        object.__setattr__(self, "transfer_weights", tuple(float(x) for x in self.transfer_weights))

    def fee(self, j: int, e_j: float) -> float:
        return self.fee_rate * max(0.0, float(e_j) - self.threshold[j])

    def collected(self, e: Sequence[float]) -> float:
        return float(sum(self.fee(k, e[k]) for k in range(len(e))))

    def transfers(self, e: Sequence[float]) -> Tuple[float, ...]:
        pot = self.collected(e)
        return tuple(w * pot for w in self.transfer_weights)

    def __call__(self, j: int, e: Sequence[float]) -> float:
        """Revenue district j must raise: own spending plus own fee minus its transfer."""
        return float(e[j]) + self.fee(j, e[j]) - self.transfer_weights[j] * self.collected(e)

    def budget_audit(self, e: Sequence[float]) -> dict:
        collected = self.collected(e)
        transferred = float(sum(self.transfers(e)))
        return {"collected": collected, "transferred": transferred, "imbalance": collected - transferred}


@dataclass(frozen=True)
class PolicyReport:
    baseline: GameSolution
    treated: GameSolution
    objective_delta: Tuple[float, ...]
    pareto: bool
    strict_gainers: Tuple[str, ...]
    harmed: Tuple[str, ...] = ()
    details: dict = field(default_factory=dict)

    @classmethod
    def compare(cls, ids: Sequence[str], baseline: GameSolution, treated: GameSolution, **details) -> "PolicyReport":
        delta = tuple(float(t - b) for t, b in zip(treated.totals, baseline.totals))
        return cls(
            baseline=baseline,
            treated=treated,
            objective_delta=delta,
            pareto=all(d >= -PARETO_SLACK for d in delta),
            strict_gainers=tuple(i for i, d in zip(ids, delta) if d > PARETO_SLACK),
            harmed=tuple(i for i, d in zip(ids, delta) if d < -PARETO_SLACK),
            details=details,
        )

    @property
    def min_delta(self) -> float:
        return min(self.objective_delta)

    def rows(self, ids: Sequence[str]) -> list:
        return [
            {
                "district": ids[j],
                "e_baseline": self.baseline.e_star[j],
                "e_treated": self.treated.e_star[j],
                "objective_baseline": self.baseline.totals[j],
                "objective_treated": self.treated.totals[j],
                "objective_delta": self.objective_delta[j],
            }
            for j in range(len(ids))
        ]


@dataclass(frozen=True)
class RentalOutcome:
    district: int
    q: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    tau1: np.ndarray
    tau2: np.ndarray
    m: np.ndarray

    def identity_residual(self, r: float) -> float:
        """max |f1 + tau1 + (f2 + tau2)/(1+r) + m| over the grid."""
        lhs = self.f1 + self.tau1 + (self.f2 + self.tau2) / (1.0 + r)
        return float(np.max(np.abs(lhs + self.m)))
