"""
fiscal_tiebout package initializer.
"""

from . import diagnostics
from . import districts
from . import econ
from . import market
from . import policy
from . import rdd
from . import storage

__all__ = ["diagnostics", "districts", "econ", "market", "policy", "rdd", "storage"]
