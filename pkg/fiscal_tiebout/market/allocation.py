"""
Monotone assignment of arrivals to locations.

Responsibilities:
    - Pool the districts' location-quality measures (quality shifted by s(e^j))
    - Match the income distribution to the pooled measure quantile by quantile:
      l(w) = G^{-1}(F(w))
    - Report per-district arrival measures Gamma^j(w), house choices q^j(w),
      segments with their active districts, and type/quality cutoffs

Design notes:
    - Every measure is piecewise linear, so l(w) is piecewise linear on a finite
      set of type knots (F^{-1} of the pooled knots plus the knots of F). Flat
      stretches of G make l jump (a quality-dominance gap); atoms of G make l flat
      (homogeneous homes), and the types on an atom are split across districts in
      proportion to their atom sizes.
    - The allocation depends on the expenditure profile only through the school
      qualities; `assign_by_quality` is the entry point for callers that already
      work in s-space (fixed-gap problems).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .distributions import PiecewiseLinearCdf
from .economy import Economy

log = logging.getLogger("fiscal_tiebout.market")

ACTIVE_TOL = 1e-12


@dataclass(frozen=True)
class Segment:
    """Type interval (w_lo, w_hi] on which l is linear, with the districts receiving arrivals."""

    w_lo: float
    w_hi: float
    ell_lo: float
    ell_hi: float
    slope: float
    active: Tuple[int, ...]


class Allocation:
    """
    The unique monotone location allocation for a school-quality profile.

    All evaluation methods are vectorized over w.
    """

    def __init__(self, econ: Economy, school: Sequence[float]):
        econ.check_masses()
        self.econ = econ
        self.school = np.asarray(school, dtype=float)
        self.F = econ.income.curve
        self.parts: List[PiecewiseLinearCdf] = [
            d.housing.curve.shifted(self.school[j]) for j, d in enumerate(econ.districts)
        ]
        self.G = PiecewiseLinearCdf.pooled(self.parts)
        self.knots = self._type_knots()
        self.segments = self._build_segments()

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------
    def _type_knots(self) -> np.ndarray:
        w = np.concatenate([np.atleast_1d(self.F.ppf(self.G.cs)), self.F.xs])
        w = np.clip(w, self.F.lo, self.F.hi)
        w = np.unique(w)
        keep = np.concatenate([[True], np.diff(w) > 1e-13 * max(1.0, abs(self.F.hi))])
        return w[keep]

    def _build_segments(self) -> List[Segment]:
        segments = []
        for a, b in zip(self.knots[:-1], self.knots[1:]):
            h = b - a
            w1, w3 = a + 0.25 * h, a + 0.75 * h
            l1, l3 = self.location(w1), self.location(w3)
            slope = (l3 - l1) / (w3 - w1)
            ell_lo = l1 - 0.25 * h * slope
            ell_hi = l3 + 0.25 * h * slope
            segments.append(
                Segment(
                    w_lo=float(a),
                    w_hi=float(b),
                    ell_lo=float(ell_lo),
                    ell_hi=float(ell_hi),
                    slope=float(slope),
                    active=self._active_at(0.5 * (l1 + l3)),
                )
            )
        return segments

    def _active_at(self, ell: float) -> Tuple[int, ...]:
        active = []
        for j, part in enumerate(self.parts):
            if part.atom(ell) > ACTIVE_TOL or part.pdf(ell) > 0:
                active.append(j)
        return tuple(active)

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------
    def location(self, w):
        """l(w): location quality (house quality plus school quality) taken by type w."""
        return self.G.ppf(self.F.cdf(w))

    def gamma(self, j: int, w):
        """Gamma^j(w): mass of arrivals with type <= w settling in district j."""
        u = np.asarray(self.F.cdf(w), dtype=float)
        ell = np.asarray(self.G.ppf(u), dtype=float)
        g_left = np.asarray(self.G.cdf_left(ell), dtype=float)
        g_right = np.asarray(self.G.cdf(ell), dtype=float)
        part = self.parts[j]
        own_left = np.asarray(part.cdf_left(ell), dtype=float)
        own_atom = np.asarray(part.cdf(ell), dtype=float) - own_left
        total_atom = g_right - g_left
        share = np.where(total_atom > ACTIVE_TOL, own_atom / np.where(total_atom > ACTIVE_TOL, total_atom, 1.0), 0.0)
        out = np.where(
            total_atom > ACTIVE_TOL,
            own_left + np.clip(u - g_left, 0.0, None) * share,
            np.asarray(part.cdf(ell), dtype=float),
        )
        return float(out) if out.ndim == 0 else out

    def house_choice(self, j: int, w):
        """q^j(w) = l(w) - s_j, clipped to district j's housing support."""
        d = self.econ.districts[j].housing
        out = np.clip(np.asarray(self.location(w)) - self.school[j], d.lo, d.hi)
        return float(out) if np.ndim(out) == 0 else out

    def location_slope(self, w) -> float:
        return self.segment_at(w).slope

    def segment_at(self, w: float) -> Segment:
        k = int(np.searchsorted(self.knots, w, side="left")) - 1
        k = min(max(k, 0), len(self.segments) - 1)
        return self.segments[k]

    def jumps(self) -> List[Tuple[float, float]]:
        """(w, l(w+) - l(w-)) at type knots where location quality jumps."""
        out = []
        for prev, nxt in zip(self.segments[:-1], self.segments[1:]):
            gap = nxt.ell_lo - prev.ell_hi
            if gap > 1e-12:
                out.append((nxt.w_lo, gap))
        return out

    def type_for_quality(self, j: int, q):
        """
        Type living at quality q of district j.

        For an atom of the pooled measure the midpoint of the types sharing it is
        returned; money values are constant on that set.
        """
        ell = np.asarray(q, dtype=float) + self.school[j]
        u = 0.5 * (np.asarray(self.G.cdf_left(ell)) + np.asarray(self.G.cdf(ell)))
        out = self.F.ppf(u)
        return float(out) if np.ndim(out) == 0 else out

    # ------------------------------------------------------------------
    # Cutoffs
    # ------------------------------------------------------------------
    @property
    def cutoffs(self) -> List[float]:
        """Type boundaries where the active district set changes."""
        out = []
        for prev, nxt in zip(self.segments[:-1], self.segments[1:]):
            if prev.active != nxt.active:
                out.append(nxt.w_lo)
        return out

    @property
    def lower_cutoff(self) -> float:
        """w_*: top of the bottom single-district stretch (w_min when the bottom is shared)."""
        first = self.segments[0]
        if len(first.active) != 1:
            return self.econ.w_min
        for seg in self.segments:
            if seg.active != first.active:
                return seg.w_lo
        return self.econ.w_max

    @property
    def upper_cutoff(self) -> float:
        """w^*: bottom of the top single-district stretch (w_max when the top is shared)."""
        last = self.segments[-1]
        if len(last.active) != 1:
            return self.econ.w_max
        for seg in reversed(self.segments):
            if seg.active != last.active:
                return seg.w_hi
        return self.econ.w_min

    def quality_at_cutoff(self, j: int, w: float) -> float:
        return self.house_choice(j, w)

    def segment_table(self) -> List[dict]:
        ids = [d.id for d in self.econ.districts]
        return [
            {
                "w_lo": s.w_lo,
                "w_hi": s.w_hi,
                "ell_lo": s.ell_lo,
                "ell_hi": s.ell_hi,
                "active": "|".join(ids[j] for j in s.active),
            }
            for s in self.segments
        ]


def assign_by_quality(econ: Economy, school: Sequence[float]) -> Allocation:
    return Allocation(econ, school)


def assign_locations(econ: Economy, e: Sequence[float]) -> Allocation:
    """
    Unique monotone location allocation for expenditure profile e.

    Raises:
        MassMismatch: if housing and population masses differ.
        ValueError: on negative expenditure.
    """
    e = np.asarray(e, dtype=float)
    if e.shape != (econ.n,):
        raise ValueError(f"Expected {econ.n} expenditures, got shape {e.shape}")
    if np.any(e < 0):
        raise ValueError("Expenditures must be nonnegative")
    alloc = Allocation(econ, econ.school_profile(e))
    log.debug("allocation: %d segments, cutoffs=%s", len(alloc.segments), alloc.cutoffs)
    return alloc
