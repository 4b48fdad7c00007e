from .utility import UtilitySpec
from .savings import (
    PaymentPriceVector,
    SavingsSolution,
    invert_value_in_money,
    marginal_value,
    money_marginal_value,
    pdv,
    solve_savings,
    value_in_money,
)

__all__ = [
    "UtilitySpec",
    "PaymentPriceVector",
    "SavingsSolution",
    "pdv",
    "solve_savings",
    "marginal_value",
    "value_in_money",
    "money_marginal_value",
    "invert_value_in_money",
]
