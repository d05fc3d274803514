"""Finite-set geometry and the micro-solvers behind it."""
from .cloud import (
    PointCloud,
    distance_matrix,
    distances_to_cloud,
    excess,
    hausdorff,
    project_to_cloud,
    projection_indices,
)
from .inclusion import InclusionResult, dist_to_hull, inclusion_within
from .lp import LPResult, solve_lp
from .mnp import MinNormResult, min_norm_point
from .polyhedron import Polyhedron
from .project import is_feasible, project_polyhedron

__all__ = [
    "InclusionResult",
    "LPResult",
    "MinNormResult",
    "PointCloud",
    "Polyhedron",
    "dist_to_hull",
    "distance_matrix",
    "distances_to_cloud",
    "excess",
    "hausdorff",
    "inclusion_within",
    "is_feasible",
    "min_norm_point",
    "project_polyhedron",
    "project_to_cloud",
    "projection_indices",
    "solve_lp",
]
