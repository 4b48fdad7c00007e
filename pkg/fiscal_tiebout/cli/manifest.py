"""
Run manifests.

Every command writes ``manifest.json`` next to its outputs. The config hash
is the SHA-256 of the normalized scenario, so two runs with the same hash,
seed and artifact version must produce the same result files. Timestamps
are informational and live only in the manifest.
"""

from __future__ import annotations

from datetime import datetime, timezone
from typing import List, Optional

from pydantic import BaseModel, Field

from ..config import settings


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class RunManifest(BaseModel):
    command: str
    config_hash: str
    seed: int
    artifact_version: str = settings.ARTIFACT_VERSION
    started_at: str = Field(default_factory=_now)
    finished_at: Optional[str] = None
    exit_code: Optional[int] = None
    outputs: List[str] = Field(default_factory=list)

    def finish(self, outputs: List[str], exit_code: int = 0) -> "RunManifest":
        return self.model_copy(update={"outputs": sorted(outputs), "finished_at": _now(), "exit_code": exit_code})

    def reproduction_key(self) -> tuple:
        """What must match for two runs to be byte-identical."""
        return (self.config_hash, self.seed, self.artifact_version)
