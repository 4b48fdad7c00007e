"""
In-memory solver trace.

Responsibilities:
    - Record best-response iterations (profile and max change), in order
    - Summarize a run: iteration count, last/min change, cycling
    - Export events as rows for the diagnostics CSV written on non-convergence

Events carry no timestamps, so traces of identical runs compare equal.

LLM Prompt Example:
    "Explain how to detect a 2-cycle in a damped fixed-point iteration from the
    recorded profiles alone."
"""

from typing import Dict, List, Sequence

import numpy as np

from .base import BaseTrace

CYCLE_SHRINK = 0.9


class SolverTrace(BaseTrace):
    def __init__(self, tolerance: float = 1e-6):
        """
        Args:
            tolerance (float): convergence tolerance of the traced solver; profiles
                within 10x this distance count as repeated when detecting cycles.
        """
        self.tolerance = tolerance
        self.events: List[Dict] = []

    def log_event(self, iteration: int, profile: Sequence[float], change: float) -> None:
        self.events.append({
            "iteration": int(iteration),
            "profile": tuple(float(x) for x in profile),
            "change": float(change),
        })

    def get_events(self, last: int = 0) -> List[Dict]:
        """All events, or only the last `last` ones."""
        return self.events[-last:] if last else list(self.events)

    def cycle_detected(self) -> bool:
        """
        True when the last profiles alternate: e_k ~ e_{k-2} while |BR(e_k) - e_k|
        stays above tolerance.
        """
        return self._cycle_at(len(self.events))

    def _cycle_at(self, n: int) -> bool:
        """Cycle test on the first n events."""
        if n < 3:
            return False
        last, prev, two_back = self.events[n - 1], self.events[n - 2], self.events[n - 3]
        if last["change"] <= self.tolerance:
            return False
        dist = np.max(np.abs(np.subtract(last["profile"], two_back["profile"])))
        moved = np.max(np.abs(np.subtract(last["profile"], prev["profile"])))
        return bool(dist <= 10 * self.tolerance < moved)

    def persistent_cycle(self, window: int) -> bool:
        """
        A 2-cycle flagged at each of the last `window` iterations whose change has
        not shrunk below CYCLE_SHRINK of its value `window` iterations back. Slowly
        converging oscillations shrink and are not reported.
        """
        if window < 1 or len(self.events) < window + 3:
            return False
        for k in range(window):
            if not self._cycle_at(len(self.events) - k):
                return False
        return self.events[-1]["change"] >= CYCLE_SHRINK * self.events[-1 - window]["change"]

    def summary(self) -> dict:
        changes = [ev["change"] for ev in self.events]
        return {
            "iterations": len(self.events),
            "last_change": changes[-1] if changes else None,
            "min_change": min(changes) if changes else None,
            "cycle_detected": self.cycle_detected(),
            "last_profile": self.events[-1]["profile"] if self.events else None,
        }

    def rows(self) -> List[Dict]:
        out = []
        for ev in self.events:
            row = {"iteration": ev["iteration"], "change": ev["change"]}
            row.update({f"e_{j}": x for j, x in enumerate(ev["profile"])})
            out.append(row)
        return out
