"""Hierarchical question answering over a categorized Bengali sentence repository."""

__version__ = "0.1.0"

from .engine import Engine  # noqa: E402
from .persistence import load_state, save_state  # noqa: E402

__all__ = ["Engine", "load_state", "save_state", "__version__"]
