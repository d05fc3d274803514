"""Finite point clouds, excess, Hausdorff distance and metric projections."""
from __future__ import annotations

import numpy as np

from .. import kernels
from ..errors import DimensionError, InputError
from ..norms import L2, NormSpec

METRICS = ("coeff", "primal", "dual")


_SMALL = 64


def _dedup(pts: np.ndarray) -> np.ndarray:
    """Drop exact duplicate rows, keeping first occurrences in order."""
    k = pts.shape[0]
    if k == 1:
        return pts
    if k <= _SMALL:
        seen = {}
        for i, row in enumerate(pts + 0.0):  # + 0.0 identifies -0.0 with 0.0
            seen.setdefault(row.tobytes(), i)
        if len(seen) == k:
            return pts
        return pts[sorted(seen.values())]
    _, first = np.unique(pts, axis=0, return_index=True)
    return pts if first.size == k else pts[np.sort(first)]


class PointCloud:
    """Nonempty finite set of points in R^dim, in insertion order.

    Exact duplicates are removed on construction (first occurrence kept).
    """

    __slots__ = ("points",)

    def __init__(self, points):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise DimensionError("a point cloud needs at least one point of dimension >= 1")
        if not np.all(np.isfinite(pts)):
            raise InputError("point cloud coordinates must be finite")
        pts = _dedup(pts)
        pts.setflags(write=False)
        self.points = pts

    @classmethod
    def coerce(cls, obj) -> "PointCloud":
        return obj if isinstance(obj, PointCloud) else cls(obj)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    def __repr__(self):
        return f"PointCloud(dim={self.dim}, size={len(self)})"

    def membership(self, T) -> np.ndarray:
        """Boolean mask: which rows of ``T`` are (exactly) points of the cloud."""
        T = np.atleast_2d(np.asarray(T, dtype=float))
        return (T[:, None, :] == self.points[None, :, :]).all(axis=-1).any(axis=1)

    def contains(self, t) -> bool:
        return bool(self.membership(np.asarray(t, dtype=float).reshape(1, -1))[0])

    def union(self, *others) -> "PointCloud":
        return PointCloud(np.vstack([self.points] + [PointCloud.coerce(o).points for o in others]))

    def same_set(self, other) -> bool:
        other = PointCloud.coerce(other)
        return (
            self.dim == other.dim
            and bool(self.membership(other.points).all())
            and bool(other.membership(self.points).all())
        )


def _exponent(spec: NormSpec, metric: str) -> tuple[int, bool]:
    if metric not in METRICS:
        raise InputError(f"metric must be one of {METRICS}")
    p = spec.p if metric == "primal" else spec.dual_p
    code = 0 if np.isinf(p) else int(p)
    return code, metric == "coeff"


def distance_matrix(A, B, spec: NormSpec = L2, metric: str = "coeff") -> np.ndarray:
    A = np.atleast_2d(np.asarray(A.points if isinstance(A, PointCloud) else A, dtype=float))
    B = np.atleast_2d(np.asarray(B.points if isinstance(B, PointCloud) else B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise DimensionError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    if metric == "coeff" and A.shape[1] < 2:
        raise DimensionError("coefficient metric needs dimension n+1 >= 2")
    code, split = _exponent(spec, metric)
    return kernels.pairwise_distances(A, B, code, split)


def distances_to_cloud(T, U, spec: NormSpec = L2, metric: str = "coeff") -> np.ndarray:
    """``d(t, U)`` for each row ``t`` of ``T``."""
    return distance_matrix(T, U, spec, metric).min(axis=1)


def excess(A, B, spec: NormSpec = L2, metric: str = "coeff") -> float:
    """``e(A, B) = max_{p in A} d(p, B)``."""
    return float(distances_to_cloud(A, B, spec, metric).max())


def hausdorff(A, B, spec: NormSpec = L2, metric: str = "coeff") -> float:
    """``d_H(A, B) = max(e(A, B), e(B, A))`` from a single distance matrix."""
    D = distance_matrix(A, B, spec, metric)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def _lex_rank(points: np.ndarray) -> np.ndarray:
    order = np.lexsort(points.T[::-1])
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order))
    return rank


def projection_indices(T, U, spec: NormSpec = L2, metric: str = "coeff") -> np.ndarray:
    """Index into ``U`` of the selected nearest point for each row of ``T``.

    Among exact ties the lexicographically smallest point wins.
    """
    U = PointCloud.coerce(U)
    D = distance_matrix(T, U, spec, metric)
    ties = D == D.min(axis=1, keepdims=True)
    rank = _lex_rank(U.points)
    return np.where(ties, rank[None, :], len(U)).argmin(axis=1)


def project_to_cloud(t, U, spec: NormSpec = L2, metric: str = "coeff") -> np.ndarray:
    """Deterministic selection of the metric projection of ``t`` onto ``U``."""
    U = PointCloud.coerce(U)
    t = np.asarray(t, dtype=float).reshape(1, -1)
    return U.points[projection_indices(t, U, spec, metric)[0]].copy()
