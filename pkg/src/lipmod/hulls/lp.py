"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Meant for desk-scale problems (tens of variables and rows). Variables are
free unless ``bounds`` says otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import DEFAULT_TOL, ToleranceConfig
from ..errors import DimensionError, SolverError
from .polyhedron import Polyhedron

_PIVOT_TOL = 1e-11
_COST_TOL = 1e-11


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None
    value: float
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _standard_form(n, bounds):
    """Return (T, o, extra_rows) with ``x = T y + o``, ``y >= 0``.

    ``extra_rows`` lists ``(col, cap)`` meaning ``y[col] <= cap``.
    """
    if bounds is None:
        lo = np.full(n, -np.inf)
        hi = np.full(n, np.inf)
    else:
        lo, hi = bounds
        lo = np.broadcast_to(np.asarray(lo, dtype=float), (n,)).copy()
        hi = np.broadcast_to(np.asarray(hi, dtype=float), (n,)).copy()
    cols = []
    o = np.zeros(n)
    caps = []
    for j in range(n):
        if np.isfinite(lo[j]):
            o[j] = lo[j]
            cols.append((j, 1.0))
            if np.isfinite(hi[j]):
                caps.append((len(cols) - 1, hi[j] - lo[j]))
        elif np.isfinite(hi[j]):
            o[j] = hi[j]
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    T = np.zeros((n, len(cols)))
    for k, (j, s) in enumerate(cols):
        T[j, k] = s
    return T, o, caps


class _Tableau:
    def __init__(self, M, rhs, basis, max_iter):
        self.M = M
        self.rhs = rhs
        self.basis = basis
        self.iterations = 0
        self.max_iter = max_iter

    def pivot(self, r, c):
        M, rhs = self.M, self.rhs
        p = M[r, c]
        M[r] /= p
        rhs[r] /= p
        col = M[:, c].copy()
        col[r] = 0.0
        nz = np.nonzero(col)[0]
        if nz.size:
            M[nz] -= np.outer(col[nz], M[r])
            rhs[nz] -= col[nz] * rhs[r]
        M[:, c] = 0.0
        M[r, c] = 1.0
        np.maximum(rhs, 0.0, out=rhs, where=np.abs(rhs) < 1e-14)
        self.basis[r] = c

    def optimise(self, cost, allowed):
        """Minimise ``cost @ z``; returns 'optimal' or 'unbounded'."""
        M, rhs = self.M, self.rhs
        while True:
            if self.iterations >= self.max_iter:
                raise SolverError("simplex iteration limit reached",
                                  bound=float(cost[self.basis] @ rhs))
            reduced = cost - cost[self.basis] @ M
            entering = -1
            for j in np.nonzero(allowed & (reduced < -_COST_TOL))[0]:
                entering = int(j)
                break
            if entering < 0:
                return "optimal"
            col = M[:, entering]
            rows = np.nonzero(col > _PIVOT_TOL)[0]
            if rows.size == 0:
                return "unbounded"
            ratios = rhs[rows] / col[rows]
            best = ratios.min()
            tied = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            leave = int(tied[np.argmin(np.asarray(self.basis)[tied])])
            self.pivot(leave, entering)
            self.iterations += 1


def solve_lp(objective, constraints: Polyhedron | None = None, bounds=None, *,
             eq=None, maximize: bool = False, tol: ToleranceConfig = DEFAULT_TOL) -> LPResult:
    """Minimise (or maximise) ``objective @ x`` over a polyhedron.

    Parameters
    ----------
    objective : array_like, shape (n,)
    constraints : Polyhedron, optional
        Inequalities ``A x <= b``.
    bounds : (lower, upper), optional
        Per-variable box; entries may be infinite. Default: all free.
    eq : (A_eq, b_eq), optional
        Equality rows.
    maximize : bool
    tol : ToleranceConfig
        ``feas_tol`` decides phase-one infeasibility, ``max_iter`` caps pivots.

    Returns
    -------
    LPResult
        ``status`` is one of ``optimal``, ``infeasible``, ``unbounded``.
    """
    c = np.asarray(objective, dtype=float).reshape(-1)
    n = c.size
    if constraints is None:
        constraints = Polyhedron(np.zeros((0, n)), np.zeros(0), n)
    if constraints.n != n:
        raise DimensionError("objective and constraints disagree on dimension")
    A_eq = np.zeros((0, n)) if eq is None else np.atleast_2d(np.asarray(eq[0], dtype=float))
    b_eq = np.zeros(0) if eq is None else np.asarray(eq[1], dtype=float).reshape(-1)
    if A_eq.shape[1] != n or A_eq.shape[0] != b_eq.size:
        raise DimensionError("equality block has inconsistent shape")
    sign = -1.0 if maximize else 1.0

    T, o, caps = _standard_form(n, bounds)
    N = T.shape[1]
    A_ub = constraints.A @ T
    b_ub = constraints.b - constraints.A @ o
    if caps:
        cap_rows = np.zeros((len(caps), N))
        for k, (col, cap) in enumerate(caps):
            cap_rows[k, col] = 1.0
        A_ub = np.vstack([A_ub, cap_rows])
        b_ub = np.concatenate([b_ub, [cap for _, cap in caps]])
    A_e = A_eq @ T
    b_e = b_eq - A_eq @ o
    m_ub, m_eq = A_ub.shape[0], A_e.shape[0]
    m = m_ub + m_eq

    if m == 0:
        cy = sign * (c @ T)
        if np.any(cy < -_COST_TOL):
            return LPResult("unbounded", None, sign * -np.inf)
        x = o.copy()
        return LPResult("optimal", x, float(c @ x))

    needs_art = np.concatenate([b_ub < 0, np.ones(m_eq, dtype=bool)])
    n_art = int(needs_art.sum())
    width = N + m_ub + n_art
    M = np.zeros((m, width))
    rhs = np.concatenate([b_ub, b_e])
    M[:m_ub, :N] = A_ub
    M[m_ub:, :N] = A_e
    M[np.arange(m_ub), N + np.arange(m_ub)] = 1.0
    basis = [0] * m
    art = N + m_ub
    for i in range(m):
        if rhs[i] < 0:
            M[i] *= -1.0
            rhs[i] *= -1.0
        if needs_art[i]:
            M[i, art] = 1.0
            basis[i] = art
            art += 1
        else:
            basis[i] = N + i
    tab = _Tableau(M, rhs, basis, tol.max_iter)
    is_art = np.zeros(width, dtype=bool)
    is_art[N + m_ub:] = True

    if n_art:
        cost1 = is_art.astype(float)
        tab.optimise(cost1, np.ones(width, dtype=bool))
        infeas = float(cost1[tab.basis] @ tab.rhs)
        scale = 1.0 + float(np.abs(np.concatenate([b_ub, b_e])).max(initial=0.0))
        if infeas > tol.feas_tol * scale:
            return LPResult("infeasible", None, np.nan, tab.iterations)
        drop = []
        for r in range(m):
            if is_art[tab.basis[r]]:
                cand = np.nonzero(~is_art & (np.abs(tab.M[r]) > 1e-9))[0]
                if cand.size:
                    tab.pivot(r, int(cand[0]))
                else:
                    drop.append(r)
        if drop:
            keep = [r for r in range(m) if r not in drop]
            tab.M = tab.M[keep]
            tab.rhs = tab.rhs[keep]
            tab.basis = [tab.basis[r] for r in keep]

    cost2 = np.zeros(width)
    cost2[:N] = sign * (c @ T)
    status = tab.optimise(cost2, ~is_art)
    if status == "unbounded":
        return LPResult("unbounded", None, sign * -np.inf, tab.iterations)
    y = np.zeros(width)
    y[tab.basis] = tab.rhs
    x = T @ y[:N] + o
    return LPResult("optimal", x, float(c @ x), tab.iterations)
