"""
Imbens-Kalyanaraman plug-in bandwidth for local-linear RDD with a triangular kernel.

1. Pilot: Silverman-type bandwidth h1 = 1.84 * sd(x) * N^(-1/5); density at
   the cutoff and conditional variances on each side from the pilot window.
2. Third derivative from a global cubic (with intercept shift) fitted between
   the medians of each side; it sets side-specific pilot widths h2.
3. Second derivatives from local quadratics on each side within h2, plus the
   regularization terms r = 2160 * sigma^2 / (N2 * h2^4).
4. h = C_K * ((s2_l + s2_r) / (f * ((m2_r - m2_l)^2 + r_r + r_l)))^(1/5) * N^(-1/5).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientData

log = logging.getLogger("fiscal_tiebout.rdd")


@dataclass(frozen=True)
class IkConstants:
    pilot: float = 1.84
    third_derivative: float = 3.56
    regularization: float = 2160.0
    kernel: float = 3.4375
    regularize: bool = True


def _lstsq(columns, y) -> np.ndarray:
    X = np.column_stack(columns)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return coef


def ik_bandwidth(x, y, cutoff: float = 0.0, *, constants: IkConstants = IkConstants()) -> float:
    """
    Optimal bandwidth for the jump of E[y | x] at ``cutoff``.

    Raises:
        InsufficientData: if a side has fewer than 3 points in a pilot window.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(x) & np.isfinite(y)
    d, y = x[ok] - cutoff, y[ok]
    n = d.size
    right, left = d >= 0.0, d < 0.0
    if right.sum() < 3 or left.sum() < 3:
        raise InsufficientData("IK bandwidth needs observations on both sides of the cutoff")

    h1 = constants.pilot * np.std(d, ddof=1) * n ** (-0.2)
    win_l = left & (d >= -h1)
    win_r = right & (d <= h1)
    if win_l.sum() < 2 or win_r.sum() < 2:
        raise InsufficientData("pilot window has too few observations")
    f = (win_l.sum() + win_r.sum()) / (2.0 * n * h1)
    var_l = np.var(y[win_l], ddof=1)
    var_r = np.var(y[win_r], ddof=1)

    med_l, med_r = np.median(d[left]), np.median(d[right])
    mid = (d >= med_l) & (d <= med_r)
    dm = d[mid]
    coef = _lstsq([np.ones_like(dm), (dm >= 0).astype(float), dm, dm**2, dm**3], y[mid])
    m3 = 6.0 * coef[4]

    def pilot2(var, count, span):
        if m3 == 0.0:
            return span
        h = constants.third_derivative * (var / (f * m3**2)) ** (1.0 / 7.0) * count ** (-1.0 / 7.0)
        return min(h, span)

    h2_l = pilot2(var_l, left.sum(), -d[left].min())
    h2_r = pilot2(var_r, right.sum(), d[right].max())

    sel_l = left & (d >= -h2_l)
    sel_r = right & (d <= h2_r)
    if sel_l.sum() < 3 or sel_r.sum() < 3:
        raise InsufficientData("curvature window has too few observations")
    dl, dr = d[sel_l], d[sel_r]
    m2_l = 2.0 * _lstsq([np.ones_like(dl), dl, dl**2], y[sel_l])[2]
    m2_r = 2.0 * _lstsq([np.ones_like(dr), dr, dr**2], y[sel_r])[2]

    reg = 0.0
    if constants.regularize:
        reg = constants.regularization * (var_l / (sel_l.sum() * h2_l**4) + var_r / (sel_r.sum() * h2_r**4))
    h = constants.kernel * ((var_l + var_r) / (f * ((m2_r - m2_l) ** 2 + reg))) ** 0.2 * n ** (-0.2)
    log.debug("IK bandwidth: h1=%.4g h2=(%.4g, %.4g) h=%.4g", h1, h2_l, h2_r, h)
    return float(h)
