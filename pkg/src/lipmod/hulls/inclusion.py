"""Checker for inclusions ``A  subset of  conv(B) + eps * ball``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import DEFAULT_TOL, ToleranceConfig
from ..errors import DimensionError
from ..norms import L2, NormSpec
from .cloud import PointCloud
from .mnp import min_norm_point


@dataclass
class InclusionResult:
    holds: bool
    worst: float
    eps: float

    @property
    def margin(self) -> float:
        """``worst - eps``; nonpositive exactly when the inclusion holds."""
        return self.worst - self.eps


def dist_to_hull(a, generators, spec: NormSpec = L2, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Dual-norm distance from ``a`` to ``conv(generators)``."""
    G = PointCloud.coerce(generators).points
    a = np.asarray(a, dtype=float).reshape(-1)
    if a.shape[0] != G.shape[1]:
        raise DimensionError("point and generators differ in dimension")
    return min_norm_point(G - a, spec, tol).dist


def inclusion_within(A, Bgen, eps: float, spec: NormSpec = L2,
                     tol: ToleranceConfig = DEFAULT_TOL) -> InclusionResult:
    A = PointCloud.coerce(A)
    Bgen = PointCloud.coerce(Bgen)
    if A.dim != Bgen.dim:
        raise DimensionError("clouds differ in dimension")
    worst = max(dist_to_hull(a, Bgen, spec, tol) for a in A.points)
    return InclusionResult(bool(worst <= eps + tol.solver_tol), float(worst), float(eps))
