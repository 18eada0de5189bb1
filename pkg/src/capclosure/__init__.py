"""Capability of class-two, exponent-p groups through a closure operator on subspaces."""

__version__ = "0.1.0"

from .closure import (
    CapabilityReport,
    capability_report,
    closure,
    interior,
    is_closed,
    is_open,
    star_V,
    star_W,
)
from .fpalg import Subspace
from .spaces import SpaceContext, make_context

__all__ = [
    "CapabilityReport",
    "Subspace",
    "SpaceContext",
    "capability_report",
    "closure",
    "interior",
    "is_closed",
    "is_open",
    "make_context",
    "star_V",
    "star_W",
    "__version__",
]
