"""Cycle separators and DFS trees for embedded planar graphs, simulated in CONGEST."""
from __future__ import annotations

from .congest_engine import CostMeter, ExecutionReport, SimConfig, run
from .dfs_builder import DfsResult, build_dfs, phase_bound
from .oracle_verify import CoTreeOracle, Verdict, check_dfs_tree, check_separator, oracle_regions
from .planar_core import (
    Partition,
    PlanarGraph,
    build_graph,
    diameter,
    generate,
    grid,
    load_json,
    quadrant_partition,
    random_planar,
    random_triangulation,
    save_json,
)
from .separator import SeparatorWitness, compute_separators, verify_witness
from .tree_toolkit import RootedTree, RunEnv, build_part_trees, tree_of_graph

__version__ = "0.1.0"

__all__ = [
    "CoTreeOracle",
    "CostMeter",
    "DfsResult",
    "ExecutionReport",
    "Partition",
    "PlanarGraph",
    "RootedTree",
    "RunEnv",
    "SeparatorWitness",
    "SimConfig",
    "Verdict",
    "build_dfs",
    "build_graph",
    "build_part_trees",
    "check_dfs_tree",
    "check_separator",
    "compute_separators",
    "diameter",
    "generate",
    "grid",
    "load_json",
    "oracle_regions",
    "phase_bound",
    "quadrant_partition",
    "random_planar",
    "random_triangulation",
    "run",
    "save_json",
    "tree_of_graph",
    "verify_witness",
]
