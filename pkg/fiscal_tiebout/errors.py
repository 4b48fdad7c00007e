"""
Named errors raised across fiscal_tiebout.

Validation problems subclass ValueError, solver failures subclass RuntimeError,
so callers that only know the builtin categories still catch them. The CLI maps
them onto exit codes (2 validation, 3 convergence, 4 I/O).
"""

from typing import Any, Optional


class FiscalTieboutError(Exception):
    """Base class for every error raised by this package."""


# ---------------------------------------------------------------------------
# econ
# ---------------------------------------------------------------------------
class InfeasibleBudget(FiscalTieboutError, ValueError):
    """No savings choice gives positive consumption in both periods."""


class Unattainable(FiscalTieboutError, ValueError):
    """A target value lies outside the range of V(w, .)."""


# ---------------------------------------------------------------------------
# market
# ---------------------------------------------------------------------------
class MassMismatch(FiscalTieboutError, ValueError):
    """Housing mass and population mass differ."""


class OdeStepFailure(FiscalTieboutError, RuntimeError):
    """The money-value ODE could not be advanced."""


class RateRequired(FiscalTieboutError, ValueError):
    """The stationary price formula needs a strictly positive interest rate."""


# ---------------------------------------------------------------------------
# districts / policy
# ---------------------------------------------------------------------------
class RevenueInfeasible(FiscalTieboutError, ValueError):
    """Revenue cannot be raised while keeping incumbent consumption positive."""


class NoConvergence(FiscalTieboutError, RuntimeError):
    """Best-response iteration hit its cap or kept alternating; `trace` holds the iteration summary."""

    def __init__(self, message: str, trace: Optional[Any] = None):
        super().__init__(message)
        self.trace = trace


class NoImprovingCap(FiscalTieboutError, RuntimeError):
    """No common cap reduction helps every district; `report` holds the evidence."""

    def __init__(self, message: str, report: Optional[Any] = None):
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------------------
# rdd
# ---------------------------------------------------------------------------
class InvalidParams(FiscalTieboutError, ValueError):
    """Panel generator parameters are out of range."""


class InsufficientData(FiscalTieboutError, ValueError):
    """Too few observations on one side of the cutoff."""


class SingularDesign(FiscalTieboutError, ValueError):
    """The regression design matrix is rank deficient."""


class WeakFirstStage(UserWarning):
    """First-stage discontinuity has |t| < 2; the fuzzy estimate is flagged."""


class IsolatedMunicipality(UserWarning):
    """A municipality has no admissible neighbours; neighbour outcomes are missing."""


# ---------------------------------------------------------------------------
# cli
# ---------------------------------------------------------------------------
class ConfigValidationError(FiscalTieboutError, ValueError):
    """Scenario file failed validation; message carries the field-level detail."""
