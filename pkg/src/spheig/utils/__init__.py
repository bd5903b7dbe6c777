from .debug import setup_debug
from .pool import map_concurrent

__all__ = ["map_concurrent", "setup_debug"]
