from .instruments import CapPolicy, FeePolicy, PolicyReport, RentalOutcome
from .caps import find_pareto_caps, solve_capped_equilibrium
from .fees import solve_fee_policy
from .renters import FloorReport, expenditure_floor_check, rental_rates, stationary_rent
from .statics import StaticsReport, classify_case, comparative_statics_audit

__all__ = [
    "CapPolicy",
    "FeePolicy",
    "PolicyReport",
    "RentalOutcome",
    "find_pareto_caps",
    "solve_capped_equilibrium",
    "solve_fee_policy",
    "FloorReport",
    "expenditure_floor_check",
    "rental_rates",
    "stationary_rent",
    "StaticsReport",
    "classify_case",
    "comparative_statics_audit",
]
