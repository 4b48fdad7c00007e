"""
Home prices implied by PDVs and tax bills.

A home bought for p1, taxed tau and resold for p2 has PDV -p1 - tau + p2/(1+r);
solving for p1 gives the purchase price. In a steady state p1 = p2 = p, the
fixed point of p = -tau + p/(1+r) - m is p = ((1+r)/r)(-tau - m).
"""

from __future__ import annotations

import numpy as np

from ..errors import RateRequired


def two_period_price(tau1, p2, m, r: float):
    """Purchase price -tau1 + p2/(1+r) - m. Vectorized."""
    out = -np.asarray(tau1, dtype=float) + np.asarray(p2, dtype=float) / (1.0 + r) - np.asarray(m, dtype=float)
    return float(out) if out.ndim == 0 else out


def steady_state_prices(m, tau, r: float):
    """
    Stationary price schedule ((1+r)/r)(-tau - m). Vectorized.

    Raises:
        RateRequired: if r <= 0.
    """
    if r <= 0:
        raise RateRequired(f"Steady-state prices need r > 0, got r={r!r}")
    out = (1.0 + r) / r * (-np.asarray(tau, dtype=float) - np.asarray(m, dtype=float))
    return float(out) if out.ndim == 0 else out
