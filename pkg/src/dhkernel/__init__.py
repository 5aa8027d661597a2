"""Kernelization toolkit for distance-hereditary vertex deletion."""

from .graph import Graph, components, is_biclique, is_split, twin_classes
from .obstructions import (
    Obstruction,
    find_any_obstruction,
    find_small_obstruction,
    greedy_obstruction_packing,
    is_distance_hereditary,
    obstruction_through_path,
    weighted_long_hole,
)

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "components",
    "twin_classes",
    "is_biclique",
    "is_split",
    "Obstruction",
    "is_distance_hereditary",
    "find_small_obstruction",
    "find_any_obstruction",
    "weighted_long_hole",
    "obstruction_through_path",
    "greedy_obstruction_packing",
    "__version__",
]
