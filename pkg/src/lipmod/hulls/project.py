"""Metric projection onto polyhedra.

Euclidean projections use Hildreth's cyclic dual ascent followed by an
exact active-set polish; the l1 and linf cases are linear programs with
epigraph variables. One-dimensional polyhedra are intervals and are
clipped directly.
"""
from __future__ import annotations

import numpy as np

from .. import kernels
from ..config import DEFAULT_TOL, ToleranceConfig
from ..errors import DimensionError, InfeasibleError, SolverError
from ..norms import L2, NormSpec, lp_norm
from .lp import solve_lp
from .polyhedron import Polyhedron

_CHUNK = 25


def is_feasible(P: Polyhedron, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Phase-one feasibility test."""
    if len(P) == 0:
        return True
    if P.n == 1:
        return P.interval() is not None
    return solve_lp(np.zeros(P.n), P, tol=tol).status != "infeasible"


def _polish(x, P: Polyhedron, support, tol):
    """Exact projection onto ``{A_S y = b_S}``; ``None`` unless KKT holds."""
    if len(support) == 0:
        y = x.copy()
        return y if P.violation(y) <= tol.feas_tol else None
    As = P.A[support]
    bs = P.b[support]
    mu = np.linalg.lstsq(As @ As.T, As @ x - bs, rcond=None)[0]
    if np.any(mu < -1e-12 * (1.0 + np.abs(mu).max())):
        return None
    y = x - As.T @ mu
    if P.violation(y) > tol.feas_tol:
        return None
    return y


def _hildreth(x, P: Polyhedron, tol: ToleranceConfig):
    A = np.ascontiguousarray(P.A)
    b = np.ascontiguousarray(P.b)
    row_sq = np.ascontiguousarray((A * A).sum(axis=1))
    y = x.copy()
    lam = np.zeros(len(P))
    sweeps = 0
    scale = 1.0 + float(np.abs(b).max(initial=0.0))
    while sweeps < tol.max_iter:
        change = kernels.hildreth_sweeps(A, b, y, lam, row_sq, _CHUNK)
        sweeps += _CHUNK
        slack = A @ y - b
        for support in (np.nonzero(lam > 0)[0],
                        np.nonzero((lam > 0) | (slack >= -1e-9 * scale))[0]):
            z = _polish(x, P, support, tol)
            if z is not None:
                return z
        if change < tol.solver_tol and slack.max() < tol.feas_tol:
            return y
    raise SolverError("Hildreth projection did not converge",
                      bound=float(np.sqrt(((y - x) ** 2).sum())))


def _lp_projection(x, P: Polyhedron, p, tol):
    n = P.n
    if p == np.inf:
        # vars y (n, free), t ; |y_j - x_j| <= t
        nv = n + 1
        rows = np.zeros((2 * n, nv))
        rows[:n, :n] = np.eye(n)
        rows[n:, :n] = -np.eye(n)
        rows[:, n] = -1.0
    else:
        # vars y (n, free), w (n) ; |y_j - x_j| <= w_j
        nv = 2 * n
        rows = np.zeros((2 * n, nv))
        rows[:n, :n] = np.eye(n)
        rows[n:, :n] = -np.eye(n)
        rows[:n, n:] = -np.eye(n)
        rows[n:, n:] = -np.eye(n)
    rhs = np.concatenate([x, -x])
    feas = np.hstack([P.A, np.zeros((len(P), nv - n))])
    A = np.vstack([rows, feas])
    b = np.concatenate([rhs, P.b])
    lo = np.concatenate([np.full(n, -np.inf), np.zeros(nv - n)])
    c = np.concatenate([np.zeros(n), np.ones(nv - n)])
    res = solve_lp(c, Polyhedron(A, b), (lo, np.full(nv, np.inf)), tol=tol)
    if res.status == "infeasible":
        raise InfeasibleError("polyhedron is empty")
    if not res.optimal:
        raise SolverError(f"projection LP ended with status {res.status}")
    return res.x[:n]


def project_polyhedron(x, P: Polyhedron, spec: NormSpec = L2, tol: ToleranceConfig = DEFAULT_TOL):
    """Nearest point of ``P`` to ``x`` in the primal norm.

    Returns
    -------
    y : ndarray
    dist : float
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != P.n:
        raise DimensionError(f"point has dimension {x.shape[0]}, polyhedron {P.n}")
    if len(P) == 0 or P.violation(x) <= 0.0:
        return x.copy(), 0.0
    if P.n == 1:
        iv = P.interval()
        if iv is None:
            raise InfeasibleError("polyhedron is empty")
        y = np.clip(x, iv[0], iv[1])
        return y, float(abs(y[0] - x[0]))
    if not is_feasible(P, tol):
        raise InfeasibleError("polyhedron is empty")
    if spec.p == 2:
        y = _hildreth(x, P, tol)
    else:
        y = _lp_projection(x, P, spec.p, tol)
    return y, float(lp_norm(y - x, spec.p))
