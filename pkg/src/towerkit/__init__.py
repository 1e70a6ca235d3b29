"""Commutator calculus, Magnus depth and pro-group checks for a three-generator relator tower."""

from towerkit.errors import (
    CapMismatchError,
    ParseError,
    PreconditionError,
    RankError,
    ResourceLimitError,
    TowerkitError,
    TransportError,
    UnsupportedMatrixError,
)
from towerkit.magnus import Depth, TruncatedSeries, auto_depth, beta, depth
from towerkit.words import FreeGroup, Word, commutator, conjugate, invert, multiply, parse, reduce

__version__ = "0.1.0"

__all__ = [
    "CapMismatchError",
    "Depth",
    "FreeGroup",
    "ParseError",
    "PreconditionError",
    "RankError",
    "ResourceLimitError",
    "TowerkitError",
    "TransportError",
    "TruncatedSeries",
    "UnsupportedMatrixError",
    "Word",
    "auto_depth",
    "beta",
    "commutator",
    "conjugate",
    "depth",
    "invert",
    "multiply",
    "parse",
    "reduce",
]
