from .distributions import DistributionSpec, PiecewiseLinearCdf
from .technology import BaseTechnology, LogTechnology, PowerTechnology, get_technology
from .economy import District, Economy
from .allocation import Allocation, Segment, assign_by_quality, assign_locations
from .money_values import MoneyValueSolution, money_values
from .prices import steady_state_prices, two_period_price
from .audit import IcReport, ic_audit
from .oracle import DiscreteEquilibrium, discrete_equilibrium

__all__ = [
    "DistributionSpec",
    "PiecewiseLinearCdf",
    "BaseTechnology",
    "LogTechnology",
    "PowerTechnology",
    "get_technology",
    "District",
    "Economy",
    "Allocation",
    "Segment",
    "assign_by_quality",
    "assign_locations",
    "MoneyValueSolution",
    "money_values",
    "steady_state_prices",
    "two_period_price",
    "IcReport",
    "ic_audit",
    "DiscreteEquilibrium",
    "discrete_equilibrium",
]
