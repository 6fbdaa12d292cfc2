"""Exact computations with quantum Capelli operators on symmetric pairs of type A."""

from .family import FamilyDescriptor, Kind, build_family
from .scalar import Q, RatFunc, parse_ratfunc

__all__ = ["FamilyDescriptor", "Kind", "build_family", "Q", "RatFunc", "parse_ratfunc"]
__version__ = "0.1.0"
