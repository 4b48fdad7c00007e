"""
Multi-start bounded maximization for one-dimensional district problems.

District objectives need not be concave in own expenditure, so the interval is
split geometrically (objective curvature is concentrated near zero spending)
and scipy's bounded Brent search runs on each piece. End points are always
evaluated; ties go to the smallest maximizer.
"""

from __future__ import annotations

import logging
from typing import Callable, List, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

log = logging.getLogger("fiscal_tiebout.districts")

SUB_BRACKETS = (0.0, 0.01, 0.1, 1.0)
TIE_RTOL = 1e-12


def maximize_bounded(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    xatol: float = 1e-9,
    maxiter: int = 500,
) -> Tuple[float, float]:
    """
    Approximate argmax of f on [lo, hi] with its value.

    Non-finite values are treated as very poor, never as errors.
    """
    if hi < lo:
        raise ValueError(f"Empty search interval [{lo}, {hi}]")

    cache = {}

    def value(x: float) -> float:
        x = float(x)
        if x not in cache:
            fx = float(f(x))
            cache[x] = fx if np.isfinite(fx) else -np.inf
        return cache[x]

    candidates: List[Tuple[float, float]] = [(lo, value(lo)), (hi, value(hi))]
    if hi - lo > xatol:
        edges = lo + (hi - lo) * np.asarray(SUB_BRACKETS)
        for a, b in zip(edges[:-1], edges[1:]):
            if b - a <= xatol:
                continue
            res = minimize_scalar(
                lambda x: -value(x) if np.isfinite(value(x)) else 1e300,
                bounds=(a, b),
                method="bounded",
                options={"xatol": xatol, "maxiter": maxiter},
            )
            candidates.append((float(res.x), value(res.x)))

    best = max(v for _, v in candidates)
    if not np.isfinite(best):
        return lo, best
    tol = TIE_RTOL * max(1.0, abs(best))
    x_best = min(x for x, v in candidates if v >= best - tol)
    log.debug("bounded search on [%.6g, %.6g]: x=%.10g f=%.12g (%d evaluations)", lo, hi, x_best, best, len(cache))
    return x_best, value(x_best)
