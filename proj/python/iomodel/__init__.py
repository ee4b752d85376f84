"""Input-output economy analysis: sustainability, equilibrium, taxation and aggregation."""

from ._core import *  # noqa: F401,F403
from ._core import IOModelError

__all__ = [name for name in dir() if not name.startswith("_")]
