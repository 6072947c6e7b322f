"""Finite-stage toolkit for Sacks conditions, codes, forcing decisions and family engines."""
from .errors import *  # noqa: F401,F403
from .report import FusionReport
from .trees import InducedMap, TreeCondition
from .products import ProductCondition, SuitableFunction

__version__ = "0.1.0"

__all__ = ["FusionReport", "InducedMap", "TreeCondition", "ProductCondition", "SuitableFunction"]
