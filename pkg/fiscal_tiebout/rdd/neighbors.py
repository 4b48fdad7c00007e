"""Neighbour-averaged outcomes for spillover regressions."""

from __future__ import annotations

import logging
import warnings

import pandas as pd

from ..errors import IsolatedMunicipality
from .panel import OUTCOME_FIELDS, Panel

log = logging.getLogger("fiscal_tiebout.rdd")


def neighbor_outcomes(panel: Panel, exclude_shared_school: bool = False) -> Panel:
    """
    Panel whose outcome fields are replaced by the mean over contiguous
    municipalities in the same year. Own margin and win are kept, so the
    usual estimators measure the neighbours' response to a local vote.

    With ``exclude_shared_school`` neighbours in the same school district
    are ignored. Municipalities left without neighbours get missing
    outcomes and an IsolatedMunicipality warning.
    """
    rows = panel.rows
    pairs = panel.neighbor_pairs()
    if exclude_shared_school:
        school = rows.drop_duplicates("muni_id").set_index("muni_id")["school_district_id"]
        same = pairs["muni_a"].map(school).to_numpy() == pairs["muni_b"].map(school).to_numpy()
        pairs = pairs[~same]

    values = rows[["muni_id", "year", *OUTCOME_FIELDS]].rename(columns={"muni_id": "muni_b"})
    averaged = (
        pairs.merge(values, on="muni_b", how="inner")
        .groupby(["muni_a", "year"], sort=True)[list(OUTCOME_FIELDS)]
        .mean()
        .reset_index()
        .rename(columns={"muni_a": "muni_id"})
    )
    derived = rows.drop(columns=list(OUTCOME_FIELDS)).merge(averaged, on=["muni_id", "year"], how="left")

    isolated = sorted(set(rows["muni_id"]) - set(pairs["muni_a"]))
    if isolated:
        warnings.warn(
            f"{len(isolated)} municipalities have no admissible neighbours (first: {isolated[0]})",
            IsolatedMunicipality,
            stacklevel=2,
        )
    log.info("Neighbour outcomes: %d edges used, %d isolated", len(pairs) // 2, len(isolated))
    return panel.with_rows(derived)
