from .grid import QualityGrid
from .taxes import TaxSchedule, optimal_tax_schedule, schedule_for_revenue
from .horizon import DistrictHorizon, HorizonInputs, stationary_horizon
from .objective import DistrictObjectiveValue, district_objective, objective_from_pdvs, own_expenditure
from .game import (
    GameSolution,
    baseline_horizon,
    best_response,
    evaluate_profile,
    expenditure_bound,
    fixed_gap_best_response,
    fixed_gap_profile,
    nash_equilibrium,
)

__all__ = [
    "QualityGrid",
    "TaxSchedule",
    "optimal_tax_schedule",
    "schedule_for_revenue",
    "DistrictHorizon",
    "HorizonInputs",
    "stationary_horizon",
    "DistrictObjectiveValue",
    "district_objective",
    "objective_from_pdvs",
    "own_expenditure",
    "GameSolution",
    "baseline_horizon",
    "best_response",
    "evaluate_profile",
    "expenditure_bound",
    "fixed_gap_best_response",
    "fixed_gap_profile",
    "nash_equilibrium",
]
