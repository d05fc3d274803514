"""Nearest point to the origin in the convex hull of finitely many points.

The distance is measured in the *dual* norm of ``spec`` (the hull lives in
the space of gradients). For the Euclidean case Wolfe's algorithm is used;
polyhedral duals are handled as linear programs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import DEFAULT_TOL, ToleranceConfig
from ..errors import SolverError
from ..norms import L2, NormSpec, lp_norm
from .cloud import PointCloud
from .lp import solve_lp
from .polyhedron import Polyhedron


@dataclass
class MinNormResult:
    point: np.ndarray
    dist: float
    weights: np.ndarray


def _affine_minimizer(P):
    """Weights ``v`` (sum 1) minimising ``||v @ P||_2`` over the affine hull."""
    k = P.shape[0]
    G = P @ P.T
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = G
    K[:k, k] = 1.0
    K[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    v = sol[:k]
    return v / v.sum()


def _wolfe(P, tol: ToleranceConfig):
    m = P.shape[0]
    scale = max(1.0, float((P * P).sum(axis=1).max()))
    eps = 1e-12
    start = int(np.argmin((P * P).sum(axis=1)))
    S = [start]
    w = np.array([1.0])
    x = P[start].copy()
    prev = np.inf
    for _ in range(tol.max_iter):
        xx = float(x @ x)
        if xx <= tol.solver_tol**2 or xx >= prev:
            break
        prev = xx
        j = int(np.argmin(P @ x))
        if xx - float(P[j] @ x) <= 1e-13 * scale or j in S:
            break
        S.append(j)
        w = np.append(w, 0.0)
        while True:
            v = _affine_minimizer(P[S])
            if np.all(v > eps):
                w = v
                break
            mask = v <= eps
            denom = w[mask] - v[mask]
            theta = min(1.0, float(np.min(np.where(denom > 0, w[mask] / np.where(denom > 0, denom, 1.0), 1.0))))
            w = w + theta * (v - w)
            keep = w > eps
            if keep.all():
                keep[int(np.argmin(w))] = False
            S = [s for s, k in zip(S, keep) if k]
            w = w[keep]
            w = w / w.sum()
        x = w @ P[S]
    else:
        raise SolverError("min-norm point iteration limit reached", bound=float(np.sqrt(x @ x)))
    weights = np.zeros(m)
    weights[S] = w
    # Polish on the final support: exact affine minimiser if it stays convex.
    v = _affine_minimizer(P[S])
    if np.all(v >= 0):
        weights = np.zeros(m)
        weights[S] = v
    point = weights @ P
    return point, float(np.sqrt(point @ point)), weights


def _lp_min_norm(P, q, tol):
    """LP for the min of ``||lam @ P||_q`` (q in {1, inf}) over the simplex."""
    m, n = P.shape
    if q == np.inf:
        # vars: lam (m), t ; -t <= (P' lam)_j <= t
        nv = m + 1
        A = np.zeros((2 * n, nv))
        A[:n, :m] = P.T
        A[n:, :m] = -P.T
        A[:, m] = -1.0
    else:
        # vars: lam (m), w (n) ; -w_j <= (P' lam)_j <= w_j
        nv = m + n
        A = np.zeros((2 * n, nv))
        A[:n, :m] = P.T
        A[n:, :m] = -P.T
        A[:n, m:] = -np.eye(n)
        A[n:, m:] = -np.eye(n)
    c = np.zeros(nv)
    c[m:] = 1.0
    eq = (np.concatenate([np.ones(m), np.zeros(nv - m)])[None, :], [1.0])
    res = solve_lp(c, Polyhedron(A, np.zeros(2 * n)), (np.zeros(nv), np.full(nv, np.inf)), eq=eq, tol=tol)
    if not res.optimal:
        raise SolverError(f"min-norm LP ended with status {res.status}")
    lam = np.clip(res.x[:m], 0.0, None)
    lam /= lam.sum()
    point = lam @ P
    return point, float(lp_norm(point, q)), lam


def min_norm_point(generators, spec: NormSpec = L2, tol: ToleranceConfig = DEFAULT_TOL) -> MinNormResult:
    """Point of ``conv(generators)`` of least dual norm.

    Returns the point, its dual-norm distance to the origin and convex
    weights over the (deduplicated) generators.
    """
    P = PointCloud.coerce(generators).points
    if spec.dual_p == 2:
        point, dist, w = _wolfe(P, tol)
    else:
        point, dist, w = _lp_min_norm(P, spec.dual_p, tol)
    if dist <= tol.solver_tol:
        dist = 0.0
    return MinNormResult(point, dist, w)
