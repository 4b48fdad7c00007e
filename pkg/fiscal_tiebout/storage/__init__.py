from .base import BaseResultStore
from .storage import MemoryResultStore
from .file_store import FileResultStore
from .storage_factory import get_store

__all__ = ["BaseResultStore", "MemoryResultStore", "FileResultStore", "get_store"]
