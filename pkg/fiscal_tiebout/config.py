"""
Runtime configuration for fiscal_tiebout
========================================

Simple settings module that reads from environment variables and exposes a
stable `settings` object for the rest of the codebase. Values are read once at
import. The one exception is the result-store backend, which the storage
factory re-reads at call time so tests can switch it with monkeypatch.
Scenario inputs (economies, solver tolerances, policies) live in TOML files
and are validated by `fiscal_tiebout.cli.scenario`, not here.

Logging
-------
- FISCAL_TIEBOUT_LOG_LEVEL  : DEBUG | INFO (default) | WARNING | ERROR

Parallel sweeps
---------------
- FISCAL_TIEBOUT_WORKERS    : default process-pool size for best-response and policy
                              sweeps (default 1; clamped to [1, 64]). Never changes results.

Result storage
--------------
- FISCAL_TIEBOUT_RESULT_STORE : "file" (default) or "memory"
"""

import os


def _get_int(name: str, default: int) -> int:
    raw = os.getenv(name, str(default))
    try:
        return int(raw)
    except Exception:
        return default


def _get_level(name: str, default: str) -> str:
    raw = os.getenv(name, default).strip().upper()
    return raw if raw in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"} else default


class _Settings:
    # -------- Logging --------
    LOG_LEVEL: str = _get_level("FISCAL_TIEBOUT_LOG_LEVEL", "INFO")

    # -------- Parallel sweeps --------
    WORKERS: int = max(1, min(64, _get_int("FISCAL_TIEBOUT_WORKERS", 1)))

    # -------- Result storage --------
    RESULT_STORE: str = os.getenv("FISCAL_TIEBOUT_RESULT_STORE", "file").strip().lower()

    # Version string stamped into every run manifest
    ARTIFACT_VERSION: str = "1.0.0"


settings = _Settings()
