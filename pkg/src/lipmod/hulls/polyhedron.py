"""Polyhedra ``{x : A x <= b}`` given by a finite list of rows."""
from __future__ import annotations

from itertools import combinations

import numpy as np

from ..errors import DimensionError


class Polyhedron:
    """``{x in R^n : A x <= b}``; zero rows means the whole space."""

    __slots__ = ("A", "b")

    def __init__(self, A, b, n: int | None = None):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float).reshape(-1)
        if A.size == 0:
            if n is None:
                raise DimensionError("an empty row list needs an explicit dimension n")
            A = np.zeros((0, n))
            b = np.zeros(0)
        if A.ndim == 1:
            A = A.reshape(1, -1)
        if A.shape[0] != b.shape[0]:
            raise DimensionError("row count of A and b differ")
        if n is not None and A.shape[1] != n:
            raise DimensionError(f"rows have dimension {A.shape[1]}, expected {n}")
        self.A = A
        self.b = b

    @classmethod
    def from_rows(cls, rows, n: int | None = None) -> "Polyhedron":
        """Build from ``(a, b)`` pairs or an (m, n+1) array with ``b`` last."""
        rows = np.asarray(rows, dtype=float)
        if rows.size == 0:
            return cls(np.zeros((0, n or 0)), np.zeros(0), n)
        rows = np.atleast_2d(rows)
        return cls(rows[:, :-1], rows[:, -1], n)

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def __len__(self):
        return self.A.shape[0]

    def __repr__(self):
        return f"Polyhedron(n={self.n}, rows={len(self)})"

    def violation(self, x) -> float:
        """``max_i (a_i'x - b_i)``, or ``-inf`` for the whole space."""
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.n:
            raise DimensionError(f"point has dimension {x.shape[0]}, expected {self.n}")
        if len(self) == 0:
            return -np.inf
        return float((self.A @ x - self.b).max())

    def contains(self, x, tol: float = 1e-9) -> bool:
        return self.violation(x) <= tol

    def interval(self):
        """``(lo, hi)`` for one-dimensional polyhedra, ``None`` if empty."""
        if self.n != 1:
            raise DimensionError("interval() needs n = 1")
        a, b = self.A[:, 0], self.b
        lo, hi = -np.inf, np.inf
        pos, neg, zero = a > 0, a < 0, a == 0
        if np.any(b[zero] < 0):
            return None
        if pos.any():
            hi = float((b[pos] / a[pos]).min())
        if neg.any():
            lo = float((b[neg] / a[neg]).max())
        return None if lo > hi else (lo, hi)

    def vertices(self, tol: float = 1e-9) -> np.ndarray:
        """Vertices by enumeration of n-row subsystems (desk scale only)."""
        n = self.n
        found = []
        for idx in combinations(range(len(self)), n):
            M = self.A[list(idx)]
            if abs(np.linalg.det(M)) < 1e-12:
                continue
            v = np.linalg.solve(M, self.b[list(idx)])
            if self.violation(v) <= tol:
                found.append(v)
        if not found:
            return np.zeros((0, n))
        V = np.array(found)
        keep = []
        for i, v in enumerate(V):
            if all(np.abs(v - V[j]).max() > 1e-9 for j in keep):
                keep.append(i)
        return V[keep]
