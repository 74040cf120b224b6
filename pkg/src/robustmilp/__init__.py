"""r- and (r, s)-robustness of simple digraphs via mixed integer linear programming.

The MILP route builds integer programs from the graph Laplacian and solves
them with the bundled branch-and-bound solver; the exhaustive routines in
:mod:`robustmilp.oracle` check every subset pair and serve as ground truth.
"""

__version__ = "0.1.0"

from .api import (
    InexactResult,
    InternalInconsistency,
    Method,
    RobustnessReport,
    analyze,
    f_max,
    r_max,
    r_max_bounds,
    rs_robustness,
    s_max,
)
from .generators import Family, GenSpec, generate, random_out_tree
from .graph import Digraph, GraphError, VertexSubset, from_adjacency, from_edge_list, laplacian, reachability
from .graphio import GraphFormatError, parse_edge_list, read_graph, write_edge_list
from .oracle import RobustnessPair, determine_rmax_exhaustive, determine_robustness
from .solver import SolveConfig, SolveResult, SolveStatus, solve, solve_anytime

__all__ = [
    "Digraph",
    "Family",
    "GenSpec",
    "GraphError",
    "GraphFormatError",
    "InexactResult",
    "InternalInconsistency",
    "Method",
    "RobustnessPair",
    "RobustnessReport",
    "SolveConfig",
    "SolveResult",
    "SolveStatus",
    "VertexSubset",
    "analyze",
    "determine_rmax_exhaustive",
    "determine_robustness",
    "f_max",
    "from_adjacency",
    "from_edge_list",
    "generate",
    "laplacian",
    "parse_edge_list",
    "r_max",
    "r_max_bounds",
    "random_out_tree",
    "reachability",
    "read_graph",
    "rs_robustness",
    "s_max",
    "solve",
    "solve_anytime",
    "write_edge_list",
]
