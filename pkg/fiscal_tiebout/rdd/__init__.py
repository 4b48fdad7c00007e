from .panel import (
    ADJACENCY_COLUMNS,
    PANEL_COLUMNS,
    MunicipalityYear,
    Panel,
    PanelParams,
    aggregate_referenda,
    generate_panel,
    grid_layout,
)
from .bandwidth import IkConstants, ik_bandwidth
from .estimators import (
    RddEstimate,
    binned_scatter,
    fuzzy_rdd,
    local_linear_jump,
    local_linear_rdd,
    outcome_frame,
    poly3_jump,
    sharp_rdd_poly,
)
from .neighbors import neighbor_outcomes
from .montecarlo import MonteCarloReport, run_monte_carlo

__all__ = [
    "ADJACENCY_COLUMNS",
    "PANEL_COLUMNS",
    "MunicipalityYear",
    "Panel",
    "PanelParams",
    "aggregate_referenda",
    "generate_panel",
    "grid_layout",
    "IkConstants",
    "ik_bandwidth",
    "RddEstimate",
    "binned_scatter",
    "fuzzy_rdd",
    "local_linear_jump",
    "local_linear_rdd",
    "outcome_frame",
    "poly3_jump",
    "sharp_rdd_poly",
    "neighbor_outcomes",
    "MonteCarloReport",
    "run_monte_carlo",
]
