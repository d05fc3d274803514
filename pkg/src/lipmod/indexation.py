"""Indexations of coefficient sets over a sampled index set.

The index set is all of R^{n+1}; here it is realised by a finite sample
``T'``. For finite clouds every supremum over R^{n+1} involved below is
attained on the clouds themselves, so a sample containing them is exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, PreconditionError
from .hulls import PointCloud, projection_indices
from .hulls.cloud import distance_matrix
from .norms import L2, NormSpec, coeff_norms


@dataclass
class IndexedFamily:
    """Values ``sigma(t)`` for ``t`` in a finite index sample."""

    index_sample: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        T = self.index_sample
        T = T.points if isinstance(T, PointCloud) else T
        self.index_sample = np.atleast_2d(np.asarray(T, dtype=float))
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.index_sample.shape != self.values.shape:
            raise DimensionError("index sample and values must align")

    def range_cloud(self) -> PointCloud:
        return PointCloud(self.values)


def _project(T, U, spec):
    U = PointCloud.coerce(U)
    return U.points[projection_indices(T, U, spec, "coeff")]


def _sample(Tp) -> np.ndarray:
    return Tp.points if isinstance(Tp, PointCloud) else np.atleast_2d(np.asarray(Tp, dtype=float))


def projection_family(U0, Tp, spec: NormSpec = L2) -> IndexedFamily:
    """``t -> P_{U0}(t)``, the nominal indexation."""
    T = _sample(Tp)
    return IndexedFamily(T, _project(T, U0, spec))


def calmness_indexation(U, U0, Tp, spec: NormSpec = L2) -> IndexedFamily:
    """``t`` on ``U``; ``P_U(P_{U0}(t))`` elsewhere."""
    U, U0 = PointCloud.coerce(U), PointCloud.coerce(U0)
    T = _sample(Tp)
    if not (U.dim == U0.dim == T.shape[1]):
        raise DimensionError("clouds and index sample differ in dimension")
    values = _project(_project(T, U0, spec), U, spec)
    on_u = U.membership(T)
    values[on_u] = T[on_u]
    return IndexedFamily(T, values)


def pair_indexation(U1, U2, U0, Tp, spec: NormSpec = L2):
    """Pair of indexations of ``U1`` and ``U2`` at Chebyshev distance
    ``d_H(U1, U2)`` from each other.

    On ``U1 u U2`` both project ``t`` directly; off it, ``sigma1 = P1 P0``
    and ``sigma2 = P2 P1 P0``.
    """
    U0, U1, U2 = (PointCloud.coerce(u) for u in (U0, U1, U2))
    T = _sample(Tp)
    if not (U0.dim == U1.dim == U2.dim == T.shape[1]):
        raise DimensionError("clouds and index sample differ in dimension")
    sample = PointCloud(T)
    if not (sample.membership(U1.points).all() and sample.membership(U2.points).all()):
        raise PreconditionError("index sample must contain U1 and U2")
    on = U1.membership(T) | U2.membership(T)
    s1 = np.empty_like(T)
    s2 = np.empty_like(T)
    if on.any():
        s1[on] = _project(T[on], U1, spec)
        s2[on] = _project(T[on], U2, spec)
    off = ~on
    if off.any():
        p10 = _project(_project(T[off], U0, spec), U1, spec)
        s1[off] = p10
        s2[off] = _project(p10, U2, spec)
    return IndexedFamily(T, s1), IndexedFamily(T, s2)


def pointwise_distances(F1: IndexedFamily, F2: IndexedFamily, spec: NormSpec = L2) -> np.ndarray:
    if F1.index_sample.shape != F2.index_sample.shape or not np.array_equal(F1.index_sample, F2.index_sample):
        raise PreconditionError("families are indexed by different samples")
    return coeff_norms(F1.values - F2.values, spec)


def sup_distance(F1: IndexedFamily, F2: IndexedFamily, spec: NormSpec = L2) -> float:
    """Chebyshev distance ``max_t ||sigma1(t) - sigma2(t)||`` over the sample."""
    return float(pointwise_distances(F1, F2, spec).max())


def exterior_samples(clouds, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draws from the data bounding box scaled 2x about its centre."""
    P = np.vstack([PointCloud.coerce(c).points for c in clouds])
    lo, hi = P.min(axis=0), P.max(axis=0)
    centre = 0.5 * (lo + hi)
    half = np.maximum(hi - lo, 1e-12)
    return rng.uniform(centre - half, centre + half, size=(count, P.shape[1]))


def range_distance(F1: IndexedFamily, F2: IndexedFamily, spec: NormSpec = L2) -> float:
    """Hausdorff distance between the value clouds of two families."""
    D = distance_matrix(F1.values, F2.values, spec, "coeff")
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))
