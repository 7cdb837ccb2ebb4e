"""Randomized low-diameter decompositions of planar graphs and their separation statistics."""

from .decompositions import (
    ALGORITHMS,
    Decomposition,
    LddConfig,
    RootPolicy,
    decompose,
    diameter_bound,
    grid_axis_ldd,
    kpr,
    kpr_rand_radius,
    kpr_randwts,
    kpr_two_cuts,
    mixed_rand_radius,
)
from .graph import Graph, grid_graph, load_graph, path_graph, save_graph
from .rng import Stream

__all__ = [
    "ALGORITHMS", "Decomposition", "LddConfig", "RootPolicy", "decompose", "diameter_bound",
    "grid_axis_ldd", "kpr", "kpr_rand_radius", "kpr_randwts", "kpr_two_cuts", "mixed_rand_radius",
    "Graph", "grid_graph", "load_graph", "path_graph", "save_graph", "Stream",
]
