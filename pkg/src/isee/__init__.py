"""Case-based recommendation engine for multi-shot explanation strategies."""

from .config import Config
from .engine import Engine

__version__ = "0.1.0"

__all__ = ["Config", "Engine", "__version__"]
