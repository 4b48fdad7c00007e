"""
Synthetic municipal referendum panels with planted effects.

Municipalities sit on a square grid (rook contiguity). Horizontally adjacent
pairs share a school district. Every year each municipality holds a
referendum with probability ``propensity``; a second one follows with
probability ``multi_prob``. Referendum margins are Beta(a, b) - 0.5, so the
density is positive at the cutoff.

Outcome equations (all in logs, per year):

    levy:        dL_t = g_L + s_L*eps_t + kappa * sum_{d=1..D} W_{t-d}
                                       + psi*kappa * sum_{d=1..D} (A W)_{t-d}
    home value:  dH_t = g_H + beta1*(dL_t - g_L) + confounding*s_L*eps_t + s_H*eta_t
    income:      dI_t = g_I + income_effect*(dL_t - g_L) + s_I*nu_t

where W is the municipality-year win indicator (mean margin >= 0), D is
``effect_duration`` and A is the row-normalized contiguity matrix. A win in
year t therefore moves the levy from year t+1 on.

Loss records are dropped at ``underreport_prob``. In ``random`` mode the
drop is independent of everything else; in ``outcome`` mode only losses
followed by a positive levy shock are dropped (at twice the rate), which
biases the discontinuity upward.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterator, Optional, Union

import numpy as np
import pandas as pd
from scipy import sparse

from ..errors import InvalidParams

log = logging.getLogger("fiscal_tiebout.rdd")

PANEL_COLUMNS = ["muni_id", "year", "margin", "win", "avg_tax", "income_pc", "home_value", "school_district_id"]
ADJACENCY_COLUMNS = ["muni_a", "muni_b"]
OUTCOME_FIELDS = ("avg_tax", "income_pc", "home_value")

SeedLike = Union[int, np.random.SeedSequence, None]


@dataclass(frozen=True)
class MunicipalityYear:
    muni_id: int
    year: int
    margin: Optional[float]
    win: Optional[bool]
    avg_tax: float
    income_pc: float
    home_value: float
    school_district_id: str

    def __post_init__(self):
        if self.margin is not None:
            if not -0.5 <= self.margin <= 0.5:
                raise InvalidParams(f"margin {self.margin} outside [-0.5, 0.5]")
            if self.win != (self.margin >= 0.0):
                raise InvalidParams(f"win flag inconsistent with margin for {self.muni_id}/{self.year}")
        for name in OUTCOME_FIELDS:
            if not getattr(self, name) > 0.0:
                raise InvalidParams(f"{name} must be positive for {self.muni_id}/{self.year}")


@dataclass(frozen=True)
class PanelParams:
    n_munis: int = 500
    n_years: int = 12
    start_year: int = 1990
    propensity: float = 0.3
    multi_prob: float = 0.1
    margin_a: float = 2.0
    margin_b: float = 2.0
    kappa: float = 0.05
    beta1: float = 2.0
    psi: float = 0.0
    effect_duration: int = 1
    income_effect: float = 0.0
    confounding: float = 0.5
    underreport_prob: float = 0.0
    underreport_mode: str = "random"
    levy_growth: float = 0.025
    levy_sd: float = 0.02
    home_growth: float = 0.03
    home_sd: float = 0.03
    income_growth: float = 0.02
    income_sd: float = 0.02

    def validate(self) -> "PanelParams":
        if self.n_munis < 2 or self.n_years < 2:
            raise InvalidParams("need at least 2 municipalities and 2 years")
        for name in ("propensity", "multi_prob", "underreport_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidParams(f"{name} must lie in [0, 1], got {value}")
        if self.margin_a <= 0 or self.margin_b <= 0:
            raise InvalidParams("margin Beta parameters must be positive")
        if self.effect_duration < 1:
            raise InvalidParams("effect_duration must be >= 1")
        if self.underreport_mode not in ("random", "outcome"):
            raise InvalidParams(f"unknown underreport_mode {self.underreport_mode!r}")
        for name in ("levy_sd", "home_sd", "income_sd"):
            if getattr(self, name) < 0:
                raise InvalidParams(f"{name} must be nonnegative")
        return self

    def truth(self) -> Dict[str, float]:
        return {
            "kappa": self.kappa,
            "beta1": self.beta1,
            "psi": self.psi,
            "effect_duration": self.effect_duration,
            "income_effect": self.income_effect,
        }

    def with_(self, **changes) -> "PanelParams":
        return replace(self, **changes).validate()

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class Panel:
    rows: pd.DataFrame
    adjacency: pd.DataFrame
    dgp_truth: Optional[Dict[str, float]] = None
    referenda: Optional[pd.DataFrame] = field(default=None, repr=False)

    def __post_init__(self):
        self.rows = self.rows[PANEL_COLUMNS].sort_values(["muni_id", "year"], kind="mergesort").reset_index(drop=True)
        self.adjacency = normalize_adjacency(self.adjacency)

    def __len__(self) -> int:
        return len(self.rows)

    def records(self) -> Iterator[MunicipalityYear]:
        for rec in self.rows.to_dict("records"):
            has_ref = not pd.isna(rec["margin"])
            yield MunicipalityYear(
                muni_id=int(rec["muni_id"]),
                year=int(rec["year"]),
                margin=float(rec["margin"]) if has_ref else None,
                win=bool(rec["win"]) if has_ref else None,
                avg_tax=float(rec["avg_tax"]),
                income_pc=float(rec["income_pc"]),
                home_value=float(rec["home_value"]),
                school_district_id=str(rec["school_district_id"]),
            )

    def validate(self) -> "Panel":
        for _ in self.records():
            pass
        return self

    def neighbor_pairs(self) -> pd.DataFrame:
        """Both directions of every contiguity edge."""
        a = self.adjacency
        flipped = a.rename(columns={"muni_a": "muni_b", "muni_b": "muni_a"})
        return pd.concat([a, flipped[ADJACENCY_COLUMNS]], ignore_index=True)

    def with_rows(self, rows: pd.DataFrame) -> "Panel":
        return Panel(rows=rows, adjacency=self.adjacency, dgp_truth=self.dgp_truth)

    @classmethod
    def from_csv(cls, panel_path: Union[str, Path], adjacency_path: Union[str, Path, None] = None) -> "Panel":
        rows = pd.read_csv(panel_path, dtype={"school_district_id": str})
        missing = set(PANEL_COLUMNS) - set(rows.columns)
        if missing:
            raise InvalidParams(f"panel CSV missing columns: {sorted(missing)}")
        rows["win"] = rows["win"].astype("Int8")
        if adjacency_path is not None:
            adjacency = pd.read_csv(adjacency_path)
        else:
            adjacency = pd.DataFrame(columns=ADJACENCY_COLUMNS, dtype=int)
        return cls(rows=rows, adjacency=adjacency).validate()


def normalize_adjacency(edges: pd.DataFrame) -> pd.DataFrame:
    """Undirected edge list with muni_a < muni_b, sorted, no duplicates."""
    if edges.empty:
        return pd.DataFrame({"muni_a": pd.Series(dtype=int), "muni_b": pd.Series(dtype=int)})
    a = edges["muni_a"].to_numpy(dtype=int)
    b = edges["muni_b"].to_numpy(dtype=int)
    if np.any(a == b):
        raise InvalidParams("adjacency contains self-loops")
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    out = pd.DataFrame({"muni_a": lo, "muni_b": hi}).drop_duplicates()
    return out.sort_values(ADJACENCY_COLUMNS, kind="mergesort").reset_index(drop=True)


def grid_layout(n_munis: int):
    """(adjacency, school district labels) for municipalities on a square grid."""
    side = math.ceil(math.sqrt(n_munis))
    ids = np.arange(n_munis)
    row, col = np.divmod(ids, side)
    edges = []
    right = ids[(col + 1 < side) & (ids + 1 < n_munis)]
    edges.append(np.column_stack([right, right + 1]))
    down = ids[ids + side < n_munis]
    edges.append(np.column_stack([down, down + side]))
    pairs = np.vstack(edges)
    adjacency = pd.DataFrame(pairs, columns=ADJACENCY_COLUMNS)
    schools = np.array([f"sd{r:04d}-{c // 2:04d}" for r, c in zip(row, col)])
    return normalize_adjacency(adjacency), schools


def aggregate_referenda(referenda: pd.DataFrame) -> pd.DataFrame:
    """
    Collapse referendum records to municipality-years.

    The year's margin is the mean margin. Years with both wins and losses are
    kept with a missing margin and ``mixed=True``.
    """
    if referenda.empty:
        return pd.DataFrame(columns=["muni_id", "year", "margin", "n_referenda", "mixed"])
    won = referenda["margin"] >= 0.0
    grouped = referenda.assign(won=won).groupby(["muni_id", "year"], sort=True)
    out = grouped.agg(margin=("margin", "mean"), n_referenda=("margin", "size"), wins=("won", "sum")).reset_index()
    out["mixed"] = (out["wins"] > 0) & (out["wins"] < out["n_referenda"])
    out.loc[out["mixed"], "margin"] = np.nan
    return out.drop(columns="wins")


def _contiguity_matrix(adjacency: pd.DataFrame, n: int) -> sparse.csr_matrix:
    a = adjacency["muni_a"].to_numpy()
    b = adjacency["muni_b"].to_numpy()
    rows = np.concatenate([a, b])
    cols = np.concatenate([b, a])
    mat = sparse.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))
    degree = np.asarray(mat.sum(axis=1)).ravel()
    inv = np.divide(1.0, degree, out=np.zeros_like(degree), where=degree > 0)
    return sparse.diags(inv) @ mat


def _lagged_sum(wins: np.ndarray, duration: int) -> np.ndarray:
    out = np.zeros_like(wins)
    for d in range(1, min(duration, wins.shape[1] - 1) + 1):
        out[:, d:] += wins[:, :-d]
    return out


def generate_panel(params: PanelParams, seed: SeedLike = 0) -> Panel:
    """
    Simulate a referendum panel. Identical (params, seed) give an identical panel.

    Raises:
        InvalidParams: if params fail validation.
    """
    params.validate()
    rng = np.random.default_rng(seed)
    n, T = params.n_munis, params.n_years
    adjacency, schools = grid_layout(n)

    # referenda: first draw, optional second draw
    held = rng.random((n, T)) < params.propensity
    second = held & (rng.random((n, T)) < params.multi_prob)
    m1 = rng.beta(params.margin_a, params.margin_b, (n, T)) - 0.5
    m2 = rng.beta(params.margin_a, params.margin_b, (n, T)) - 0.5

    eps = rng.standard_normal((n, T))
    eta = rng.standard_normal((n, T))
    nu = rng.standard_normal((n, T))
    drop_u = rng.random((n, T, 2))
    log_l0 = np.log(5000.0) + 0.3 * rng.standard_normal(n)
    log_h0 = np.log(300000.0) + 0.3 * rng.standard_normal(n)
    log_i0 = np.log(40000.0) + 0.2 * rng.standard_normal(n)

    mean_margin = np.where(second, 0.5 * (m1 + m2), m1)
    wins = (held & (mean_margin >= 0.0)).astype(float)

    spill = (_contiguity_matrix(adjacency, n) @ wins) if params.psi else np.zeros_like(wins)
    effect = params.kappa * (_lagged_sum(wins, params.effect_duration) + params.psi * _lagged_sum(spill, params.effect_duration))

    levy_shock = params.levy_sd * eps
    d_levy = params.levy_growth + levy_shock + effect
    d_home = (params.home_growth + params.beta1 * (d_levy - params.levy_growth)
              + params.confounding * levy_shock + params.home_sd * eta)
    d_income = params.income_growth + params.income_effect * (d_levy - params.levy_growth) + params.income_sd * nu
    d_levy[:, 0] = d_home[:, 0] = d_income[:, 0] = 0.0
    levy = np.exp(log_l0[:, None] + np.cumsum(d_levy, axis=1))
    home = np.exp(log_h0[:, None] + np.cumsum(d_home, axis=1))
    income = np.exp(log_i0[:, None] + np.cumsum(d_income, axis=1))

    # referendum records, with loss underreporting
    next_shock = np.zeros((n, T))
    next_shock[:, :-1] = eps[:, 1:]
    recs = []
    for k, (present, margins) in enumerate(((held, m1), (second, m2))):
        lost = present & (margins < 0.0)
        if params.underreport_mode == "random":
            dropped = lost & (drop_u[:, :, k] < params.underreport_prob)
        else:
            dropped = lost & (next_shock > 0.0) & (drop_u[:, :, k] < min(1.0, 2.0 * params.underreport_prob))
        keep = present & ~dropped
        ii, tt = np.nonzero(keep)
        recs.append(pd.DataFrame({"muni_id": ii, "year": params.start_year + tt, "margin": margins[ii, tt]}))
    referenda = pd.concat(recs, ignore_index=True).sort_values(["muni_id", "year"], kind="mergesort")
    referenda = referenda.reset_index(drop=True)
    agg = aggregate_referenda(referenda)

    ii, tt = np.meshgrid(np.arange(n), np.arange(T), indexing="ij")
    rows = pd.DataFrame({
        "muni_id": ii.ravel(),
        "year": params.start_year + tt.ravel(),
        "avg_tax": levy.ravel(),
        "income_pc": income.ravel(),
        "home_value": home.ravel(),
        "school_district_id": schools[ii.ravel()],
    })
    rows = rows.merge(agg[["muni_id", "year", "margin"]], on=["muni_id", "year"], how="left")
    rows["win"] = (rows["margin"] >= 0.0).astype("Int8").where(rows["margin"].notna())
    log.info("Generated panel: %d municipalities x %d years, %d referenda", n, T, len(referenda))
    return Panel(rows=rows, adjacency=adjacency, dgp_truth=params.truth(), referenda=referenda)
