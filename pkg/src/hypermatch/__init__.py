"""Matchings and rainbow matchings in k-partite k-graphs under codegree conditions."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    DegreeProfile,
    KPartiteHypergraph,
    dumps,
    greedy_matching,
    load,
    loads,
    matching_vertices,
    save,
    validate_matching,
)
from .errors import HypothesisUnmet, InvalidInput, InvariantViolation  # noqa: E402
from .family import HypergraphFamily, validate_rainbow  # noqa: E402

__all__ = [
    "DegreeProfile",
    "HypergraphFamily",
    "HypothesisUnmet",
    "InvalidInput",
    "InvariantViolation",
    "KPartiteHypergraph",
    "dumps",
    "greedy_matching",
    "load",
    "loads",
    "matching_vertices",
    "save",
    "validate_matching",
    "validate_rainbow",
]
