"""
Result-store factory (lazy settings version)
============================================

Centralizes selection of the output backend so command handlers stay
ignorant of where artifacts go.

- Reads the backend **at call time** so tests can switch it.
- "file" needs a ``root`` directory; "memory" takes no arguments.

Environment variables (through fiscal_tiebout.config)
-----------------------------------------------------
- FISCAL_TIEBOUT_RESULT_STORE: "file" (default) or "memory"
"""

import logging
import os
from typing import Optional

from .storage import MemoryResultStore

log = logging.getLogger("fiscal_tiebout.storage")


def get_store(backend: Optional[str] = None, **kwargs):
    """
    Return a BaseResultStore for the selected backend.

    Parameters
    ----------
    backend : str, optional
        "file" or "memory". If omitted, reads FISCAL_TIEBOUT_RESULT_STORE.
    kwargs : dict
        ``root=...`` for the file backend.
    """
    be = (backend or os.getenv("FISCAL_TIEBOUT_RESULT_STORE", "file")).strip().lower()
    log.debug("Selected result store: %r", be)

    if be == "memory":
        return MemoryResultStore()

    if be == "file":
        root = kwargs.get("root")
        if not root:
            raise ValueError("root directory is required for the file result store")
        from .file_store import FileResultStore

        return FileResultStore(root)

    raise ValueError(f"Unknown result store backend: {be!r}")
