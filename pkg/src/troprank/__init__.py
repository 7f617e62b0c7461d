"""Ranks of divisors on finite graphs, metric graphs and tropical curves."""

from troprank.topology import (
    Edge,
    Graph,
    InfiniteEdge,
    MetricGraph,
    Point,
    TropicalCurve,
    ValidationError,
    branch_set,
    canonical_divisor,
    genus,
)
from troprank.divisor import Divisor, deg_plus, degree
from troprank.plfunc import PLFunction, divisor_of, make_pl

__version__ = "0.1.0"

__all__ = [
    "Edge",
    "Graph",
    "InfiniteEdge",
    "MetricGraph",
    "Point",
    "TropicalCurve",
    "ValidationError",
    "branch_set",
    "canonical_divisor",
    "genus",
    "Divisor",
    "deg_plus",
    "degree",
    "PLFunction",
    "divisor_of",
    "make_pl",
]
