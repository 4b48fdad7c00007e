"""
In-memory result store.

Keeps every artifact as the exact text the file store would write, so tests
can compare outputs byte for byte without touching disk.
"""

import json
from typing import Any, Dict, List

import pandas as pd

from .base import BaseResultStore, table_to_csv, with_suffix


class MemoryResultStore(BaseResultStore):
    def __init__(self):
        self.outputs: Dict[str, str] = {}

    def _put(self, name: str, text: str) -> str:
        self.outputs.pop(name, None)
        self.outputs[name] = text
        return name

    def save_table(self, name: str, table: pd.DataFrame) -> str:
        return self._put(with_suffix(name, ".csv"), table_to_csv(table))

    def save_text(self, name: str, text: str) -> str:
        return self._put(name, text)

    def save_json(self, name: str, payload: Dict[str, Any]) -> str:
        return self._put(with_suffix(name, ".json"), json.dumps(payload, indent=2, sort_keys=True) + "\n")

    def list_outputs(self) -> List[str]:
        return list(self.outputs)

    def read(self, name: str) -> str:
        return self.outputs[name]
