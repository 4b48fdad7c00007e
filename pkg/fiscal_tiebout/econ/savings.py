"""
Two-period consumption-savings problem and PDV arithmetic.

Responsibilities:
    - PDV of a payment-price vector (tax bill, purchase price, resale price)
    - Optimal savings for a given bundle by bracketed root finding on the Euler residual
    - Money value V(w, m) on the canonical bundle (tau=-m, p1=0, p2=0), its
      derivative in w, and its inverse in m

Design notes:
    - Income w arrives in both periods; c1 = w - p1 - tau - b, c2 = w + p2 + (1+r) b.
    - V depends on the bundle only through its PDV, so the money-value helpers work
      on lifetime wealth X = w (2+r)/(1+r) + m and use the closed forms of the
      utility family. solve_savings keeps the generic root-finding path and is what
      the closed forms are checked against.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..errors import InfeasibleBudget, Unattainable
from .utility import UtilitySpec

log = logging.getLogger("fiscal_tiebout.econ")

SAVINGS_XTOL = 1e-12


@dataclass(frozen=True)
class PaymentPriceVector:
    """(tau, p1, p2): tax bill, purchase price, resale price attached to a location."""

    tau: float = 0.0
    p1: float = 0.0
    p2: float = 0.0

    @classmethod
    def canonical(cls, m: float) -> "PaymentPriceVector":
        """Representative bundle of PDV m."""
        return cls(tau=-m, p1=0.0, p2=0.0)


@dataclass(frozen=True)
class SavingsSolution:
    b: float
    c1: float
    c2: float
    value: float
    residual: float


def pdv(z: PaymentPriceVector, r: float) -> float:
    """-p1 - tau + p2/(1+r)."""
    if 1.0 + r <= 0:
        raise ValueError("Interest rate must satisfy 1 + r > 0")
    return -z.p1 - z.tau + z.p2 / (1.0 + r)


def lifetime_wealth(w, m, r: float):
    """PDV of lifetime resources for income w and bundle PDV m."""
    return np.asarray(w, dtype=float) * (2.0 + r) / (1.0 + r) + m


def solve_savings(w: float, z: PaymentPriceVector, r: float, u: UtilitySpec) -> SavingsSolution:
    """
    Optimal savings b for type w facing bundle z.

    The Euler residual g(b) = u'(c1) - (1+r) u'(c2) is strictly increasing in b and
    diverges at both ends of the feasible interval, so a bracket is found by moving
    the end points toward the boundaries and refined with brentq.

    Raises:
        InfeasibleBudget: if no b gives c1 > 0 and c2 > 0.
    """
    if 1.0 + r <= 0:
        raise ValueError("Interest rate must satisfy 1 + r > 0")
    cash1 = w - z.p1 - z.tau
    cash2 = w + z.p2
    b_lo = -cash2 / (1.0 + r)
    b_hi = cash1
    if not b_hi > b_lo:
        raise InfeasibleBudget(f"No feasible savings for w={w}, z={z}, r={r}")

    def residual(b: float) -> float:
        c1 = cash1 - b
        c2 = cash2 + (1.0 + r) * b
        return float(u.marginal(c1) - (1.0 + r) * u.marginal(c2))

    mid = 0.5 * (b_lo + b_hi)
    half = 0.5 * (b_hi - b_lo)
    lo, hi = mid - 0.25 * half, mid + 0.25 * half
    # Expand toward the boundaries; the residual diverges there.
    for _ in range(200):
        if residual(lo) < 0:
            break
        lo = b_lo + 0.5 * (lo - b_lo)
    for _ in range(200):
        if residual(hi) > 0:
            break
        hi = b_hi - 0.5 * (b_hi - hi)

    g_lo, g_hi = residual(lo), residual(hi)
    if g_lo == 0.0:
        b = lo
    elif g_hi == 0.0:
        b = hi
    elif g_lo < 0 < g_hi:
        b = brentq(residual, lo, hi, xtol=SAVINGS_XTOL, maxiter=500)
    else:  # pragma: no cover - the Inada condition rules this out
        raise InfeasibleBudget(f"Could not bracket the Euler equation for w={w}, z={z}")

    c1 = cash1 - b
    c2 = cash2 + (1.0 + r) * b
    value = float(u.u(c1) + u.u(c2))
    return SavingsSolution(b=float(b), c1=float(c1), c2=float(c2), value=value, residual=residual(b))


def marginal_value(w: float, z: PaymentPriceVector, r: float, u: UtilitySpec) -> float:
    """dV/dw = (2+r) u'(c2) at the optimal savings choice."""
    sol = solve_savings(w, z, r, u)
    return float((2.0 + r) * u.marginal(sol.c2))


# ---------------------------------------------------------------------------
# Money value on the canonical bundle
# ---------------------------------------------------------------------------
def value_in_money(w, m, r: float, u: UtilitySpec):
    """V(w, m); -inf where lifetime wealth is not positive. Vectorized."""
    return u.lifetime_value(lifetime_wealth(w, m, r), r)


def money_marginal_value(w, m, r: float, u: UtilitySpec):
    """V_1(w, m) = (2+r)/(1+r) u'(c1). Vectorized."""
    X = lifetime_wealth(w, m, r)
    return (2.0 + r) / (1.0 + r) * u.lifetime_marginal(X, r)


def pdv_marginal_value(w, m, r: float, u: UtilitySpec):
    """V_m(w, m) = u'(c1). Vectorized."""
    return u.lifetime_marginal(lifetime_wealth(w, m, r), r)


def invert_value_in_money(w, target, r: float, u: UtilitySpec):
    """
    PDV m with V(w, m) = target.

    Raises:
        Unattainable: if any target lies outside the range of V(w, .).
    """
    X = u.lifetime_wealth(target, r)
    if np.any(~np.isfinite(X)) or np.any(X <= 0):
        raise Unattainable(f"Money value {target!r} is not attainable for w={w!r}")
    m = X - np.asarray(w, dtype=float) * (2.0 + r) / (1.0 + r)
    return float(m) if np.ndim(m) == 0 else m
