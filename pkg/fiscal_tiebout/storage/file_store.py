"""
Directory-backed result store used by the CLI.

Files are written with "\n" line endings and UTF-8 so that re-runs produce
byte-identical outputs on every platform.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd

from .base import BaseResultStore, table_to_csv, with_suffix

log = logging.getLogger("fiscal_tiebout.storage")


class FileResultStore(BaseResultStore):
    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._written: List[str] = []

    def _write(self, name: str, text: str) -> str:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if name not in self._written:
            self._written.append(name)
        log.debug("wrote %s", path)
        return name

    def save_table(self, name: str, table: pd.DataFrame) -> str:
        return self._write(with_suffix(name, ".csv"), table_to_csv(table))

    def save_text(self, name: str, text: str) -> str:
        return self._write(name, text)

    def save_json(self, name: str, payload: Dict[str, Any]) -> str:
        return self._write(with_suffix(name, ".json"), json.dumps(payload, indent=2, sort_keys=True) + "\n")

    def list_outputs(self) -> List[str]:
        return list(self._written)
