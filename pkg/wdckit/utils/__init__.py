"""Utility modules for wdckit."""

from .logging import setup_logging
from .parallel import chunked, parallel_map

__all__ = ["setup_logging", "parallel_map", "chunked"]
