"""Family types, their decidable backends, and the elimination engines."""
from .backends import CodedSet, PeriodicTree, almost_disjoint, eventually_below, eventually_different, intersection, splits
from .engines import EliminationRound, EliminationTrace, ad_eliminate, complete_real, ed_eliminate, split_in_two
from .registry import (
    BUILTIN_TYPES,
    ArithmeticalType,
    FamilyInstance,
    builtin_type,
    cofinitary_group,
    dump_family,
    is_intruder,
    is_of_type,
    load_family,
)

__all__ = [
    "ArithmeticalType", "BUILTIN_TYPES", "CodedSet", "EliminationRound", "EliminationTrace", "FamilyInstance",
    "PeriodicTree", "ad_eliminate", "almost_disjoint", "builtin_type", "cofinitary_group", "complete_real",
    "dump_family", "ed_eliminate", "eventually_below", "eventually_different", "intersection", "is_intruder",
    "is_of_type", "load_family", "split_in_two", "splits",
]
