"""
Base result-store interface for fiscal_tiebout.

Purpose:
    Define a small, stable contract that command handlers write through, so
    the same command can emit files on disk or keep everything in memory for
    tests without changing orchestration code.

Testing & Coverage:
    These are abstract methods and are not executed directly in tests.
    We annotate them with `# pragma: no cover`.

LLM Prompt Example:
    "Show how a narrow, explicit output interface lets a CLI write CSV,
    Markdown and JSON artifacts to disk or to memory interchangeably."
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List

import pandas as pd

# Full double precision in every numeric CSV cell.
FLOAT_FORMAT = "%.17g"


class BaseResultStore(ABC):
    """Abstract base class for run-output backends."""

    @abstractmethod  # pragma: no cover
    def save_table(self, name: str, table: pd.DataFrame) -> str:
        """
        Store a table as CSV under ``name`` (".csv" appended when missing).

        Returns:
            str: the stored output name.
        """
        raise NotImplementedError

    @abstractmethod  # pragma: no cover
    def save_text(self, name: str, text: str) -> str:
        """Store a text artifact (Markdown summaries)."""
        raise NotImplementedError

    @abstractmethod  # pragma: no cover
    def save_json(self, name: str, payload: Dict[str, Any]) -> str:
        """Store a JSON document with sorted keys."""
        raise NotImplementedError

    @abstractmethod  # pragma: no cover
    def list_outputs(self) -> List[str]:
        """Names written so far, in write order."""
        raise NotImplementedError


def table_to_csv(table: pd.DataFrame) -> str:
    return table.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def with_suffix(name: str, suffix: str) -> str:
    return name if name.endswith(suffix) else name + suffix
