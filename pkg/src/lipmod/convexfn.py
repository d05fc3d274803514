"""Finite convex functions with subgradient oracles, and subdifferential
stability checks over boxes.

Three variants are supported: pointwise maxima of affine pieces,
convex quadratics ``0.5 x'Qx + q'x + r`` and finite sums of these.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import DimensionError, InputError, PreconditionError
from .hulls import PointCloud, Polyhedron, hausdorff, inclusion_within, solve_lp

MAX_GENERATORS = 10_000
MAX_DEPTH = 4
GRID_MARGIN = 0.1
DEFAULT_GRID = 41


class ConvexFunction:
    n: int

    def values(self, X) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x) -> float:
        x = self._point(x)
        return float(self.values(x[None, :])[0])

    def subgradient(self, x) -> np.ndarray:
        raise NotImplementedError

    def generators(self, x, tol: ToleranceConfig = DEFAULT_TOL, _depth: int = 0) -> np.ndarray:
        raise NotImplementedError

    def _point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.n:
            raise DimensionError(f"point has dimension {x.shape[0]}, function expects {self.n}")
        return x

    def to_json(self) -> dict:
        raise NotImplementedError

    def expr(self, x):
        """The function as a cvxpy expression in the variable ``x``."""
        raise NotImplementedError

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConvexFunction):
            return NotImplemented
        return type(self) is type(other) and self.to_json() == other.to_json()

    __hash__ = None


class MaxAffine(ConvexFunction):
    """``f(x) = max_j (c_j'x + d_j)``."""

    def __init__(self, C, d):
        C = np.atleast_2d(np.asarray(C, dtype=float))
        d = np.asarray(d, dtype=float).reshape(-1)
        if C.shape[0] == 0 or C.shape[0] != d.shape[0]:
            raise InputError("max-affine functions need >= 1 piece with matching offsets")
        if not (np.all(np.isfinite(C)) and np.all(np.isfinite(d))):
            raise InputError("pieces must be finite")
        self.C, self.d = C, d
        self.n = C.shape[1]

    @classmethod
    def from_pieces(cls, pieces) -> "MaxAffine":
        """``pieces`` rows are ``[c_1, ..., c_n, d]``."""
        P = np.atleast_2d(np.asarray(pieces, dtype=float))
        return cls(P[:, :-1], P[:, -1])

    def piece_values(self, X) -> np.ndarray:
        return np.atleast_2d(X) @ self.C.T + self.d

    def values(self, X):
        return self.piece_values(X).max(axis=1)

    def subgradient(self, x):
        x = self._point(x)
        return self.C[int(np.argmax(self.piece_values(x[None, :])[0]))].copy()

    def active_pieces(self, X, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
        V = self.piece_values(X)
        return V >= V.max(axis=1, keepdims=True) - tol.active_tol

    def generators(self, x, tol=DEFAULT_TOL, _depth=0):
        x = self._point(x)
        return self.C[self.active_pieces(x[None, :], tol)[0]]

    def expr(self, x):
        import cvxpy as cp

        return cp.max(self.C @ x + self.d)

    def to_json(self):
        return {"type": "max_affine", "pieces": np.hstack([self.C, self.d[:, None]]).tolist()}

    def __repr__(self):
        return f"MaxAffine(n={self.n}, pieces={self.C.shape[0]})"


class Quadratic(ConvexFunction):
    """``f(x) = 0.5 x'Qx + q'x + r`` with ``Q`` symmetric PSD."""

    def __init__(self, Q, q=None, r=0.0):
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        if Q.shape[0] != Q.shape[1]:
            raise InputError("Q must be square")
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise InputError("Q must be symmetric")
        if np.linalg.eigvalsh(Q).min() < -1e-9:
            raise InputError("Q must be positive semidefinite")
        n = Q.shape[0]
        q = np.zeros(n) if q is None else np.asarray(q, dtype=float).reshape(-1)
        if q.shape[0] != n:
            raise DimensionError("q has the wrong dimension")
        self.Q, self.q, self.r = Q, q, float(r)
        self.n = n

    def values(self, X):
        X = np.atleast_2d(X)
        return 0.5 * np.einsum("ij,jk,ik->i", X, self.Q, X) + X @ self.q + self.r

    def gradients(self, X):
        return np.atleast_2d(X) @ self.Q + self.q

    def subgradient(self, x):
        x = self._point(x)
        return self.Q @ x + self.q

    def generators(self, x, tol=DEFAULT_TOL, _depth=0):
        return self.subgradient(x)[None, :]

    def expr(self, x):
        import cvxpy as cp

        return 0.5 * cp.quad_form(x, cp.psd_wrap(self.Q)) + self.q @ x + self.r

    def to_json(self):
        return {"type": "quadratic", "Q": self.Q.tolist(), "q": self.q.tolist(), "r": self.r}

    def __repr__(self):
        return f"Quadratic(n={self.n})"


class SumOf(ConvexFunction):
    def __init__(self, terms):
        terms = list(terms)
        if not terms:
            raise InputError("a sum needs at least one term")
        n = {t.n for t in terms}
        if len(n) != 1:
            raise DimensionError("summands differ in dimension")
        self.terms = terms
        self.n = n.pop()

    def values(self, X):
        return sum(t.values(X) for t in self.terms)

    def subgradient(self, x):
        return sum(t.subgradient(x) for t in self.terms)

    def generators(self, x, tol=DEFAULT_TOL, _depth=0):
        if _depth >= MAX_DEPTH:
            raise InputError(f"sum nesting deeper than {MAX_DEPTH} is not supported")
        x = self._point(x)
        acc = np.zeros((1, self.n))
        for t in self.terms:
            G = t.generators(x, tol, _depth + 1)
            acc = (acc[:, None, :] + G[None, :, :]).reshape(-1, self.n)
            acc = np.unique(acc, axis=0)[:MAX_GENERATORS]
        return acc

    def expr(self, x):
        return sum(t.expr(x) for t in self.terms)

    def to_json(self):
        return {"type": "sum", "terms": [t.to_json() for t in self.terms]}

    def __repr__(self):
        return f"SumOf({self.terms!r})"


def function_from_json(data: dict) -> ConvexFunction:
    kind = data.get("type")
    if kind == "max_affine":
        return MaxAffine.from_pieces(data["pieces"])
    if kind == "quadratic":
        return Quadratic(data["Q"], data.get("q"), data.get("r", 0.0))
    if kind == "sum":
        return SumOf(function_from_json(t) for t in data["terms"])
    raise InputError(f"unknown convex function type {kind!r}")


@dataclass(frozen=True)
class BoxRegion:
    """Axis-aligned box ``center +- half_widths``."""

    center: np.ndarray
    half_widths: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(-1)
        h = np.broadcast_to(np.asarray(self.half_widths, dtype=float), c.shape).copy()
        if np.any(h <= 0) or not np.all(np.isfinite(h)):
            raise InputError("box half-widths must be positive and finite")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "half_widths", h)

    @classmethod
    def from_bounds(cls, lo, hi) -> "BoxRegion":
        lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
        return cls(0.5 * (lo + hi), 0.5 * (hi - lo))

    @property
    def n(self) -> int:
        return self.center.shape[0]

    @property
    def lo(self):
        return self.center - self.half_widths

    @property
    def hi(self):
        return self.center + self.half_widths

    def inflate(self, r: float) -> "BoxRegion":
        return BoxRegion(self.center, self.half_widths + r)

    def hull(self, other: "BoxRegion") -> "BoxRegion":
        return BoxRegion.from_bounds(np.minimum(self.lo, other.lo), np.maximum(self.hi, other.hi))

    def corners(self) -> np.ndarray:
        return np.array(list(itertools.product(*zip(self.lo, self.hi))))

    def grid(self, per_axis: int = DEFAULT_GRID) -> np.ndarray:
        if per_axis < 2:
            raise InputError("grid_per_axis must be >= 2")
        axes = [np.linspace(l, h, per_axis) for l, h in zip(self.lo, self.hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)

    def to_json(self):
        return {"center": self.center.tolist(), "half_widths": self.half_widths.tolist()}

    @classmethod
    def from_json(cls, data) -> "BoxRegion":
        if "lo" in data:
            return cls.from_bounds(data["lo"], data["hi"])
        return cls(data["center"], data["half_widths"])


def eval_subgrad(f: ConvexFunction, x):
    """``(f(x), g)`` with ``g`` a subgradient (first maximal piece for
    max-affine functions)."""
    return f(x), f.subgradient(x)


def subdiff_generators(f: ConvexFunction, x, tol: ToleranceConfig = DEFAULT_TOL) -> PointCloud:
    """Finite set whose convex hull is the subdifferential at ``x``."""
    return PointCloud(f.generators(x, tol))


def _grid_generators(f: ConvexFunction, Z: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    if isinstance(f, MaxAffine):
        used = f.active_pieces(Z, tol).any(axis=0)
        return f.C[used]
    if isinstance(f, Quadratic):
        return f.gradients(Z)
    return np.vstack([f.generators(z, tol) for z in Z])


def subdiff_image(f: ConvexFunction, K: BoxRegion, grid_per_axis: int = DEFAULT_GRID,
                  tol: ToleranceConfig = DEFAULT_TOL) -> PointCloud:
    """Union of subdifferential generators over the grid of ``K``."""
    if K.n != f.n:
        raise DimensionError("box and function differ in dimension")
    return PointCloud(_grid_generators(f, K.grid(grid_per_axis), tol))


def sup_distance_on_box(f1: ConvexFunction, f2: ConvexFunction, K: BoxRegion,
                        grid_per_axis: int = DEFAULT_GRID) -> float:
    """``max |f1 - f2|`` over the grid of ``K`` (a lower bound of the sup)."""
    Z = K.grid(grid_per_axis)
    return float(np.abs(f1.values(Z) - f2.values(Z)).max())


def _max_difference_lp(f: MaxAffine, g: MaxAffine, K: BoxRegion, tol) -> float:
    """``max_{x in K} f(x) - g(x)`` for max-affine f, g (one LP per piece of f)."""
    n = f.n
    A = np.hstack([g.C, -np.ones((g.C.shape[0], 1))])
    P = Polyhedron(A, -g.d)
    bounds = (np.concatenate([K.lo, [-np.inf]]), np.concatenate([K.hi, [np.inf]]))
    best = -np.inf
    for c, d in zip(f.C, f.d):
        obj = np.concatenate([c, [-1.0]])
        res = solve_lp(obj, P, bounds, maximize=True, tol=tol)
        if not res.optimal:
            raise PreconditionError(f"sup LP ended with status {res.status}")
        x = res.x[:n]
        # re-evaluate at the maximiser to shed simplex round-off
        best = max(best, float(c @ x + d - g(x)))
    return best


def exact_sup_distance(f1: ConvexFunction, f2: ConvexFunction, K: BoxRegion,
                       tol: ToleranceConfig = DEFAULT_TOL) -> float | None:
    """Exact ``d_K(f1, f2)`` where a finite method exists, else ``None``.

    Max-affine pairs reduce to linear programs; quadratics sharing ``Q``
    differ by an affine function, maximised at a corner.
    """
    if isinstance(f1, MaxAffine) and isinstance(f2, MaxAffine):
        return max(_max_difference_lp(f1, f2, K, tol), _max_difference_lp(f2, f1, K, tol), 0.0)
    if isinstance(f1, Quadratic) and isinstance(f2, Quadratic) and np.array_equal(f1.Q, f2.Q):
        Z = K.corners()
        return float(np.abs(f1.values(Z) - f2.values(Z)).max())
    return None


def sup_distance(f1, f2, K: BoxRegion, grid_per_axis: int = DEFAULT_GRID,
                 tol: ToleranceConfig = DEFAULT_TOL):
    """``(value, exact)``: exact when available, grid lower bound otherwise."""
    v = exact_sup_distance(f1, f2, K, tol)
    if v is not None:
        return v, True
    return sup_distance_on_box(f1, f2, K, grid_per_axis), False


def within(value: float, bound: float, exact: bool) -> bool:
    """Certify ``true value <= bound`` from a measured value.

    Grid measurements are lower bounds, so they must clear the bound by
    ``GRID_MARGIN`` (relative).
    """
    if exact:
        return value <= bound * (1 + 1e-12) + 1e-15
    return value <= bound * (1 - GRID_MARGIN)


@dataclass
class CheckResult:
    """Outcome of an inequality check ``lhs <= rhs``.

    When ``hypotheses_met`` is false the inequality is not asserted and
    ``violations`` lists the failed hypotheses.
    """

    lhs: float
    rhs: float
    holds: bool
    hypotheses_met: bool = True
    violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "margin": self.margin,
            "hypotheses_met": self.hypotheses_met,
            "violations": list(self.violations),
            **self.details,
        }


def holder_stability_check(f1: ConvexFunction, f2: ConvexFunction, x0, alpha: float,
                           delta: float, tol: ToleranceConfig = DEFAULT_TOL,
                           grid_per_axis: int = DEFAULT_GRID) -> CheckResult:
    """Check ``df1(x0)  in  conv df2(x0 + sqrt(delta) B) + 4 sqrt(delta) B``.

    Hypotheses: ``0 < delta <= alpha**2`` and ``d_K(f1, f2) <= delta`` on
    ``K = x0 + alpha B``. Balls are replaced by boxes of the same half-width,
    which only strengthens the distance hypothesis and enlarges the target set.
    ``lhs`` is the worst distance from a generator of ``df1(x0)`` to the
    target hull, ``rhs`` the allowance ``4 sqrt(delta)``.
    """
    x0 = f1._point(x0)
    violations = []
    if not (0 < delta <= alpha**2):
        violations.append(f"delta={delta} not in (0, alpha^2={alpha**2}]")
    K = BoxRegion(x0, alpha)
    dK, exact = sup_distance(f1, f2, K, grid_per_axis, tol)
    if not within(dK, delta, exact):
        violations.append(f"d_K(f1,f2)={dK:.6g} exceeds delta={delta:.6g}")
    eps = 4.0 * math.sqrt(max(delta, 0.0))
    A = subdiff_generators(f1, x0, tol)
    B = subdiff_image(f2, BoxRegion(x0, math.sqrt(max(delta, 1e-300))), grid_per_axis, tol)
    inc = inclusion_within(A, B, eps, tol=tol)
    return CheckResult(
        lhs=inc.worst,
        rhs=eps,
        holds=inc.holds,
        hypotheses_met=not violations,
        violations=violations,
        details={"d_K": dK, "d_K_exact": exact, "delta": delta, "alpha": alpha},
    )


def subdiff_hausdorff(f1: ConvexFunction, K1: BoxRegion, f2: ConvexFunction, K2: BoxRegion,
                      grid_per_axis: int = DEFAULT_GRID, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Hausdorff distance (Euclidean) between sampled subdifferential images."""
    from .norms import L2

    return hausdorff(subdiff_image(f1, K1, grid_per_axis, tol),
                     subdiff_image(f2, K2, grid_per_axis, tol), L2, "dual")
