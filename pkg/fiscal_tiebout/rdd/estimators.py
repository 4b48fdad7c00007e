"""
Regression discontinuity estimators at a vote margin of zero.

Outcomes are described by (field, transform, lag). For a referendum in year t:

    growth: log y[t+lag] - log y[t-1]
    pct:    y[t+lag] / y[t-1] - 1
    level:  y[t+lag]

Sharp estimates use the cubic design

    [1, m, m^2, m^3, W*m, W*m^2, W*m^3, W]

with HC1 standard errors and report the coefficient on W. The fuzzy
estimator is the ratio of two sharp jumps on a common sample with a
delta-method standard error from the joint HC1 sandwich. The local-linear
estimator fits [1, m, W, W*m] by triangular-kernel WLS within a bandwidth.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd
import statsmodels.api as sm
from scipy.stats import norm

from ..errors import InsufficientData, SingularDesign, WeakFirstStage
from .bandwidth import IkConstants, ik_bandwidth
from .panel import OUTCOME_FIELDS, Panel

log = logging.getLogger("fiscal_tiebout.rdd")

MIN_SIDE = 50
TRANSFORMS = ("growth", "pct", "level")


@dataclass(frozen=True)
class RddEstimate:
    estimate: float
    std_error: float
    p_value: float
    n_effective: int
    bandwidth: float = math.nan
    spec: str = "poly3"
    design: str = "sharp"
    outcome: str = ""
    lag: int = 0
    first_stage_f: float = math.nan
    weak_first_stage: bool = False

    def ci(self, level: float = 0.95) -> Tuple[float, float]:
        z = norm.ppf(0.5 + level / 2.0)
        return self.estimate - z * self.std_error, self.estimate + z * self.std_error

    def covers(self, truth: float, level: float = 0.95) -> bool:
        lo, hi = self.ci(level)
        return lo <= truth <= hi

    def as_row(self) -> dict:
        row = asdict(self)
        row["se"] = row.pop("std_error")
        row["p"] = row.pop("p_value")
        row["n"] = row.pop("n_effective")
        return row


def _p_value(estimate: float, se: float) -> float:
    if se > 0.0:
        return float(2.0 * norm.sf(abs(estimate / se)))
    return 0.0 if estimate != 0.0 else 1.0


# ---------------------------------------------------------------------------
# outcome construction
# ---------------------------------------------------------------------------
def outcome_frame(panel: Panel, field: str, lag: int, transform: str = "growth") -> pd.DataFrame:
    """Referendum rows with the running variable, win flag and outcome ``y``."""
    if field not in OUTCOME_FIELDS:
        raise ValueError(f"Unknown outcome field {field!r}; expected one of {OUTCOME_FIELDS}")
    if transform not in TRANSFORMS:
        raise ValueError(f"Unknown transform {transform!r}; expected one of {TRANSFORMS}")
    if lag < 0:
        raise ValueError("lag must be nonnegative")
    rows = panel.rows
    values = rows[["muni_id", "year", field]]
    refs = rows.loc[rows["margin"].notna(), ["muni_id", "year", "margin"]]

    ahead = values.assign(year=values["year"] - lag).rename(columns={field: "after"})
    out = refs.merge(ahead, on=["muni_id", "year"], how="inner")
    if transform != "level":
        before = values.assign(year=values["year"] + 1).rename(columns={field: "before"})
        out = out.merge(before, on=["muni_id", "year"], how="inner")
        if transform == "growth":
            out["y"] = np.log(out["after"]) - np.log(out["before"])
        else:
            out["y"] = out["after"] / out["before"] - 1.0
    else:
        out["y"] = out["after"]
    out = out[np.isfinite(out["y"])]
    out["win"] = (out["margin"] >= 0.0).astype(float)
    return out[["muni_id", "year", "margin", "win", "y"]].reset_index(drop=True)


def _check_sides(margin: np.ndarray, min_side: int, where: str = "") -> None:
    n_right = int(np.sum(margin >= 0.0))
    n_left = int(np.sum(margin < 0.0))
    if n_right < min_side or n_left < min_side:
        raise InsufficientData(f"need {min_side} observations per side{where}; have {n_left} below, {n_right} above")


def poly3_design(margin) -> np.ndarray:
    m = np.asarray(margin, dtype=float)
    w = (m >= 0.0).astype(float)
    return np.column_stack([np.ones_like(m), m, m**2, m**3, w * m, w * m**2, w * m**3, w])


def _check_rank(X: np.ndarray) -> None:
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise SingularDesign(f"design matrix has rank {np.linalg.matrix_rank(X)} < {X.shape[1]}")


# ---------------------------------------------------------------------------
# array-level estimators
# ---------------------------------------------------------------------------
def poly3_jump(margin, y, *, min_side: int = MIN_SIDE):
    """(jump, HC1 se, fitted results) for the cubic sharp design."""
    margin = np.asarray(margin, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_sides(margin, min_side)
    X = poly3_design(margin)
    _check_rank(X)
    fit = sm.OLS(y, X).fit(cov_type="HC1")
    return float(fit.params[-1]), float(fit.bse[-1]), fit


def local_linear_jump(margin, y, bandwidth: float, *, min_side: int = MIN_SIDE):
    """(jump, HC1 se, n within bandwidth) from triangular-kernel WLS."""
    margin = np.asarray(margin, dtype=float)
    y = np.asarray(y, dtype=float)
    if not bandwidth > 0.0:
        raise ValueError("bandwidth must be positive")
    weights = np.maximum(0.0, 1.0 - np.abs(margin) / bandwidth)
    inside = weights > 0.0
    m, yy, wts = margin[inside], y[inside], weights[inside]
    _check_sides(m, min_side, " within bandwidth")
    w = (m >= 0.0).astype(float)
    X = np.column_stack([np.ones_like(m), m, w, w * m])
    _check_rank(X)
    fit = sm.WLS(yy, X, weights=wts).fit(cov_type="HC1")
    return float(fit.params[2]), float(fit.bse[2]), int(inside.sum())


def joint_hc1_cov(X: np.ndarray, resid_a: np.ndarray, resid_b: np.ndarray) -> np.ndarray:
    """HC1 cross-covariance of two OLS coefficient vectors sharing the design X."""
    n, k = X.shape
    bread = np.linalg.inv(X.T @ X)
    meat = (X * (resid_a * resid_b)[:, None]).T @ X
    return n / (n - k) * bread @ meat @ bread


# ---------------------------------------------------------------------------
# panel-level estimators
# ---------------------------------------------------------------------------
def sharp_rdd_poly(panel: Panel, outcome: str, lag: int, *, transform: str = "growth",
                   min_side: int = MIN_SIDE) -> RddEstimate:
    """
    Cubic sharp RDD of the outcome on the win indicator.

    Raises:
        InsufficientData: fewer than ``min_side`` observations on a side.
        SingularDesign: rank-deficient design.
    """
    frame = outcome_frame(panel, outcome, lag, transform)
    est, se, _ = poly3_jump(frame["margin"], frame["y"], min_side=min_side)
    return RddEstimate(est, se, _p_value(est, se), len(frame), spec="poly3", design="sharp",
                       outcome=f"{outcome}:{transform}", lag=lag)


def fuzzy_rdd(panel: Panel, outcome: str, treatment: str, lag: int, *, transform: str = "growth",
              treatment_transform: Optional[str] = None, min_side: int = MIN_SIDE) -> RddEstimate:
    """
    Ratio of the outcome jump to the treatment jump (a LATE).

    Both jumps use the cubic design on the same rows. A first stage with
    |t| < 2 emits WeakFirstStage and flags the estimate.
    """
    treatment_transform = treatment_transform or transform
    y_frame = outcome_frame(panel, outcome, lag, transform)
    d_frame = outcome_frame(panel, treatment, lag, treatment_transform).rename(columns={"y": "d"})
    frame = y_frame.merge(d_frame[["muni_id", "year", "d"]], on=["muni_id", "year"], how="inner")

    jump_y, _, fit_y = poly3_jump(frame["margin"], frame["y"], min_side=min_side)
    jump_d, se_d, fit_d = poly3_jump(frame["margin"], frame["d"], min_side=min_side)
    if jump_d == 0.0:
        raise SingularDesign("treatment has no discontinuity at the cutoff")
    X = poly3_design(frame["margin"])
    ry, rd = np.asarray(fit_y.resid), np.asarray(fit_d.resid)
    var_y = joint_hc1_cov(X, ry, ry)[-1, -1]
    var_d = joint_hc1_cov(X, rd, rd)[-1, -1]
    cov_yd = joint_hc1_cov(X, ry, rd)[-1, -1]

    late = jump_y / jump_d
    var = (var_y - 2.0 * late * cov_yd + late**2 * var_d) / jump_d**2
    se = math.sqrt(max(var, 0.0))
    t_first = jump_d / se_d if se_d > 0 else math.inf
    weak = abs(t_first) < 2.0
    if weak:
        warnings.warn(f"first-stage |t| = {abs(t_first):.3f} < 2 for {treatment}", WeakFirstStage, stacklevel=2)
    log.debug("fuzzy RDD %s/%s lag %d: late=%.6g se=%.3g F=%.3g", outcome, treatment, lag, late, se, t_first**2)
    return RddEstimate(late, se, _p_value(late, se), len(frame), spec="poly3", design="fuzzy",
                       outcome=f"{outcome}:{transform}/{treatment}:{treatment_transform}", lag=lag,
                       first_stage_f=float(t_first**2), weak_first_stage=weak)


def local_linear_rdd(panel: Panel, outcome: str, lag: int, bandwidth: Optional[float] = None, *,
                     transform: str = "growth", min_side: int = MIN_SIDE,
                     ik: IkConstants = IkConstants()) -> RddEstimate:
    """Local-linear sharp RDD; the bandwidth defaults to the IK choice."""
    frame = outcome_frame(panel, outcome, lag, transform)
    h = bandwidth if bandwidth is not None else ik_bandwidth(frame["margin"], frame["y"], constants=ik)
    est, se, n_eff = local_linear_jump(frame["margin"], frame["y"], h, min_side=min_side)
    return RddEstimate(est, se, _p_value(est, se), n_eff, bandwidth=float(h), spec="local_linear",
                       design="sharp", outcome=f"{outcome}:{transform}", lag=lag)


def binned_scatter(panel: Panel, outcome: str, lag: int, *, transform: str = "growth",
                   n_bins: int = 20) -> pd.DataFrame:
    """Equal-width bin means on each side of the cutoff, for external plotting."""
    frame = outcome_frame(panel, outcome, lag, transform)
    width = 0.5 / n_bins
    edges = np.linspace(-0.5, 0.5, 2 * n_bins + 1)
    idx = np.clip(np.floor((frame["margin"].to_numpy() + 0.5) / width).astype(int), 0, 2 * n_bins - 1)
    grouped = frame.assign(bin=idx).groupby("bin")["y"].agg(["mean", "count"]).reset_index()
    grouped["bin_lo"] = edges[grouped["bin"]]
    grouped["bin_hi"] = edges[grouped["bin"] + 1]
    grouped["bin_mid"] = 0.5 * (grouped["bin_lo"] + grouped["bin_hi"])
    grouped["side"] = np.where(grouped["bin_lo"] >= 0.0, "win", "loss")
    return grouped[["bin_lo", "bin_hi", "bin_mid", "side", "mean", "count"]]
