from .trace import SolverTrace
from .base import BaseTrace

__all__ = ["SolverTrace", "BaseTrace"]
