"""Reconfiguration of colorings of chordal graphs by single-vertex recolorings."""

from .engine import LemmaStats, RecolorSequence, prepare, recolor_to_canonical, transform
from .exceptions import (
    Disconnected,
    GraphFormatError,
    InfeasibleSpec,
    InternalInvariantError,
    InvalidColoring,
    KTooSmall,
    NoProperColoring,
    NotChordal,
    PropernessViolation,
    RecolorDomainError,
    RecolorError,
    StateSpaceTooLarge,
    VertexNotInSubtree,
)
from .graph import Graph, is_chordal
from .verifier import VerifyReport, verify_sequence

__all__ = [
    "Graph",
    "LemmaStats",
    "RecolorSequence",
    "VerifyReport",
    "is_chordal",
    "prepare",
    "recolor_to_canonical",
    "transform",
    "verify_sequence",
    "Disconnected",
    "GraphFormatError",
    "InfeasibleSpec",
    "InternalInvariantError",
    "InvalidColoring",
    "KTooSmall",
    "NoProperColoring",
    "NotChordal",
    "PropernessViolation",
    "RecolorDomainError",
    "RecolorError",
    "StateSpaceTooLarge",
    "VertexNotInSubtree",
]

__version__ = "0.1.0"
