"""
Abstract Base Class for solver traces.

Responsibilities:
    - Define the two methods every iteration recorder provides
    - Let solvers accept any recorder (in-memory trace, logging-only, test doubles)

LLM Prompt Example:
    "Create an abstract base class for iteration traces that defines log_event and
    summary methods, and explain how to mark abstract methods to be excluded from coverage."
"""

from abc import ABC, abstractmethod
from typing import Sequence

__all__ = ["BaseTrace"]


class BaseTrace(ABC):
    """Abstract base for pluggable solver-iteration recorders."""

    @abstractmethod
    def log_event(self, iteration: int, profile: Sequence[float], change: float) -> None:  # pragma: no cover
        """
        Record one fixed-point iteration.

        Args:
            iteration (int): 1-based iteration counter.
            profile (Sequence[float]): expenditure profile the best responses were computed at.
            change (float): max |BR(e) - e| at that profile.
        """
        raise NotImplementedError

    @abstractmethod
    def summary(self) -> dict:  # pragma: no cover
        """
        Summarize the recorded run.

        Returns:
            dict: at least iterations, last_change, min_change, cycle_detected.
        """
        raise NotImplementedError

    def persistent_cycle(self, window: int) -> bool:
        """
        True when the run has alternated between two profiles for `window`
        iterations without shrinking. Recorders that keep no history never
        report one.
        """
        return False
