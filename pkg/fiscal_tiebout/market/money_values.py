"""
Money values from the envelope condition.

Responsibilities:
    - Integrate U'(w) = V_1(w, m(w)) with U = l + M, i.e.
      dM/dw = V_1(w, m(w)) - l'(w), upward from M(w_min) = M_min
    - Carry M across quality-dominance gaps: the marginal type is indifferent
      between the two sides, so U is continuous and M drops by the gap
    - Expose M(w), U(w), m(w) and per-district PDV schedules m^j(q)

Design notes:
    - V(w, m) depends only on lifetime wealth X = a w + m with a = (2+r)/(1+r),
      so m(w) = v^{-1}(M(w)) - a w is closed form. The ODE is integrated in X:
          dX/dw = a - l'(w) * (X / D)**gamma
      which needs no inversion inside the right-hand side.
    - l' is constant on every allocation segment. With log utility the X-equation
      is linear there and is solved exactly; CRRA uses scipy's solve_ivp with
      dense output. Objective values downstream are maximized numerically, so
      integration noise has to stay far below the search tolerance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from ..econ.savings import value_in_money
from ..errors import OdeStepFailure
from .allocation import Allocation
from .economy import Economy

log = logging.getLogger("fiscal_tiebout.market")

DEFAULT_METHOD = "DOP853"
DEFAULT_RTOL = 1e-12
DEFAULT_ATOL = 1e-14


@dataclass(frozen=True)
class _Piece:
    w_lo: float
    w_hi: float
    X_lo: float
    slope: float
    sol: Optional[object] = None


def _piece_X(piece: _Piece, w: np.ndarray, a: float, D: float) -> np.ndarray:
    """X on one segment; exact for log utility (linear ODE with constant l')."""
    if piece.sol is not None:
        return piece.sol.sol(w)[0]
    dw = w - piece.w_lo
    x = (piece.slope / D) * dw
    # (1 - exp(-x)) / x, stable near zero
    with np.errstate(invalid="ignore", divide="ignore"):
        phi = np.where(np.abs(x) > 1e-12, -np.expm1(-x) / np.where(x != 0, x, 1.0), 1.0)
    return piece.X_lo * np.exp(-x) + a * dw * phi


class MoneyValueSolution:
    """
    The priced equilibrium: M(w), U(w) = l(w) + M(w) and PDVs by location.

    `offsets` adds a constant to a district's PDV schedule; it is zero for solved
    equilibria and only set through `shifted`, which audits use to corrupt prices.
    """

    def __init__(self, econ: Economy, alloc: Allocation, pieces: List[_Piece], offsets: Optional[Sequence[float]] = None):
        self.econ = econ
        self.alloc = alloc
        self._pieces = pieces
        self._knots = np.array([p.w_lo for p in pieces] + [pieces[-1].w_hi])
        self.offsets = tuple(offsets) if offsets is not None else (0.0,) * econ.n
        self._a = (2.0 + econ.r) / (1.0 + econ.r)
        self._D = econ.utility.first_period_share(econ.r)

    # ------------------------------------------------------------------
    def lifetime_wealth(self, w):
        """X(w) = a w + m(w)."""
        w = np.asarray(w, dtype=float)
        flat = np.atleast_1d(w)
        k = np.clip(np.searchsorted(self._knots, flat, side="left") - 1, 0, len(self._pieces) - 1)
        out = np.empty_like(flat)
        for idx in np.unique(k):
            mask = k == idx
            out[mask] = _piece_X(self._pieces[idx], flat[mask], self._a, self._D)
        return float(out[0]) if w.ndim == 0 else out.reshape(w.shape)

    def M(self, w):
        out = self.econ.utility.lifetime_value(self.lifetime_wealth(w), self.econ.r)
        return float(out) if np.ndim(out) == 0 else out

    def U(self, w):
        return self.alloc.location(w) + self.M(w)

    def m(self, w):
        """PDV held by type w."""
        out = self.lifetime_wealth(w) - self._a * np.asarray(w, dtype=float)
        return float(out) if np.ndim(out) == 0 else out

    def m_by_district(self, j: int, q):
        """m^j(q): PDV of the bundle attached to quality q in district j."""
        return self.m(self.alloc.type_for_quality(j, q)) + self.offsets[j]

    def value_at(self, w, j: int, q):
        """l + V(w, m) of type w at house q of district j."""
        ell = np.asarray(q, dtype=float) + self.alloc.school[j]
        return ell + value_in_money(w, self.m_by_district(j, q), self.econ.r, self.econ.utility)

    @property
    def lower_value(self) -> float:
        return float(self.econ.utility.lifetime_value(self._pieces[0].X_lo, self.econ.r))

    def shifted(self, j: int, delta: float) -> "MoneyValueSolution":
        offsets = list(self.offsets)
        offsets[j] += delta
        return MoneyValueSolution(self.econ, self.alloc, self._pieces, offsets)

    def table(self, n: int = 201) -> List[dict]:
        w = np.linspace(self.econ.w_min, self.econ.w_max, n)
        M = self.M(w)
        m = self.m(w)
        ell = self.alloc.location(w)
        return [
            {"w": float(a), "location": float(b), "M": float(c), "U": float(b + c), "m": float(d)}
            for a, b, c, d in zip(w, ell, M, m)
        ]


def money_values(
    econ: Economy,
    alloc: Allocation,
    e: Optional[Sequence[float]] = None,
    *,
    method: Optional[str] = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> MoneyValueSolution:
    """
    Solve the envelope ODE for the allocation.

    Args:
        econ: scenario.
        alloc: allocation built for the same economy.
        e: expenditure profile the allocation was built from (checked when given).
        method: "exact" (log utility only) or a solve_ivp method name. Defaults to
            "exact" for log utility and DOP853 otherwise.

    Raises:
        OdeStepFailure: if the boundary value is outside the range of V or the
            integrator fails.
    """
    if e is not None and not np.allclose(econ.school_profile(np.asarray(e, dtype=float)), alloc.school, rtol=0, atol=1e-12):
        raise ValueError("Allocation was built for a different expenditure profile")

    u, r = econ.utility, econ.r
    if method is None:
        method = "exact" if u.kind == "log" else DEFAULT_METHOD
    if method == "exact" and u.kind != "log":
        raise ValueError("The exact envelope solution is only available for log utility")

    a = (2.0 + r) / (1.0 + r)
    D = u.first_period_share(r)
    gamma = u.curvature

    X = float(u.lifetime_wealth(econ.lower_money_value, r))
    if not np.isfinite(X) or X <= 0:
        raise OdeStepFailure(f"Outside money value {econ.lower_money_value!r} is not attainable")

    jumps = dict(alloc.jumps())
    pieces: List[_Piece] = []
    for seg in alloc.segments:
        gap = jumps.get(seg.w_lo, 0.0)
        if gap:
            X = float(u.lifetime_wealth(u.lifetime_value(X, r) - gap, r))
            if not np.isfinite(X) or X <= 0:
                raise OdeStepFailure(f"Money value left the range of V at w={seg.w_lo!r}")
        if method == "exact":
            piece = _Piece(w_lo=seg.w_lo, w_hi=seg.w_hi, X_lo=X, slope=seg.slope)
            X = float(_piece_X(piece, np.array([seg.w_hi]), a, D)[0])
        else:
            slope = seg.slope

            def rhs(_w, y, slope=slope):
                return [a - slope * (max(y[0], 0.0) / D) ** gamma]

            try:
                sol = solve_ivp(rhs, (seg.w_lo, seg.w_hi), [X], method=method, rtol=rtol, atol=atol, dense_output=True)
            except Exception as exc:  # pragma: no cover - integrator internals
                raise OdeStepFailure(f"Envelope integration failed on ({seg.w_lo}, {seg.w_hi}]: {exc}") from exc
            if not sol.success:
                raise OdeStepFailure(f"Envelope integration failed on ({seg.w_lo}, {seg.w_hi}]: {sol.message}")
            piece = _Piece(w_lo=seg.w_lo, w_hi=seg.w_hi, X_lo=X, slope=slope, sol=sol)
            X = float(sol.y[0, -1])
        if not X > 0:
            raise OdeStepFailure(f"Lifetime wealth turned nonpositive at w={seg.w_hi!r}")
        pieces.append(piece)

    log.debug("money values: %d pieces (%s), X(w_max)=%.6g", len(pieces), method, X)
    return MoneyValueSolution(econ, alloc, pieces)
