"""Linearization of a convex inequality ``f(x) <= 0`` and the constants
that control how its solution set moves when ``f`` is perturbed.

The linearization of ``f`` over a region ``E`` is the coefficient set
``{(a, a'z - f(z)) : z in E, a in df(z)}``; its feasible set is the
sublevel set ``L(f)`` whenever ``E`` contains the relevant boundary.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .convexfn import (
    DEFAULT_GRID,
    BoxRegion,
    CheckResult,
    ConvexFunction,
    MaxAffine,
    Quadratic,
    function_from_json,
    subdiff_image,
    sup_distance,
    within,
)
from .errors import (
    DegenerateInstanceError,
    DimensionError,
    InfeasibleError,
    InputError,
    PreconditionError,
    SolverError,
)
from .hulls import PointCloud, Polyhedron, hausdorff, project_polyhedron, solve_lp
from .linsys import LinearSystem, ModulusReport, lipschitz_modulus
from .norms import L2

CONIC_TOL = 1e-10
ANGLES_2D = 720
DIRECTIONS_ND = 2000


def sublevel_polyhedron(f: ConvexFunction) -> Polyhedron:
    """``L(f)`` as ``{x : c_j'x <= -d_j}``; exact for max-affine ``f``."""
    if not isinstance(f, MaxAffine):
        raise InputError("sublevel_polyhedron needs a max-affine function")
    return Polyhedron(f.C, -f.d)


def _solve_conic(f: ConvexFunction, objective, x):
    """Solve ``objective`` subject to ``f(x) <= 0``; returns ``x.value``."""
    import cvxpy as cp

    prob = cp.Problem(objective, [f.expr(x) <= 0])
    try:
        with warnings.catch_warnings():
            # an inaccurate finish is reported through prob.status instead
            warnings.simplefilter("ignore", UserWarning)
            prob.solve(solver="CLARABEL", tol_gap_abs=CONIC_TOL, tol_gap_rel=CONIC_TOL,
                       tol_feas=CONIC_TOL, max_iter=500)
    except Exception as exc:  # noqa: BLE001  (solver-specific failures)
        raise SolverError(f"conic solve failed: {exc}") from exc
    if prob.status in ("infeasible", "infeasible_inaccurate"):
        raise InfeasibleError("sublevel set is empty")
    if prob.status in ("unbounded", "unbounded_inaccurate"):
        raise InputError("sublevel set is unbounded")
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise SolverError(f"conic solve ended with status {prob.status}")
    return np.asarray(x.value, dtype=float).reshape(-1)


def _support_conic(f: ConvexFunction, nu: np.ndarray) -> np.ndarray:
    import cvxpy as cp

    x = cp.Variable(f.n)
    return _solve_conic(f, cp.Maximize(nu @ x), x)


def support_point(f: ConvexFunction, nu, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """A maximiser of ``nu'x`` over ``L(f)``."""
    nu = np.asarray(nu, dtype=float).reshape(-1)
    if isinstance(f, MaxAffine):
        res = solve_lp(nu, sublevel_polyhedron(f), maximize=True, tol=tol)
        if res.status == "infeasible":
            raise InfeasibleError("sublevel set is empty")
        if res.status == "unbounded":
            raise InputError("sublevel set is unbounded")
        return res.x
    if isinstance(f, Quadratic):
        w = np.linalg.eigvalsh(f.Q)
        if w.min() <= 1e-12:
            return _support_conic(f, nu)
        Qi = np.linalg.inv(f.Q)
        c = -Qi @ f.q
        level = -f(c)
        if level < 0:
            raise InfeasibleError("sublevel set is empty")
        s = math.sqrt(float(nu @ Qi @ nu))
        if s == 0.0:
            return c
        return c + math.sqrt(2.0 * level) * (Qi @ nu) / s
    return _support_conic(f, nu)


def sublevel_bbox(f: ConvexFunction, tol: ToleranceConfig = DEFAULT_TOL):
    """``(lo, hi)`` of the bounding box of ``L(f)``."""
    lo, hi = np.empty(f.n), np.empty(f.n)
    for i in range(f.n):
        e = np.zeros(f.n)
        e[i] = 1.0
        hi[i] = support_point(f, e, tol)[i]
        lo[i] = support_point(f, -e, tol)[i]
    return lo, hi


def _box_around(lo, hi, r: float) -> BoxRegion:
    lo, hi = np.asarray(lo) - r, np.asarray(hi) + r
    return BoxRegion.from_bounds(lo, hi)


def linearize(f: ConvexFunction, region: BoxRegion, grid_per_axis: int = DEFAULT_GRID,
              tol: ToleranceConfig = DEFAULT_TOL, extra_points=None,
              spec=L2) -> LinearSystem:
    """Coefficient set of the linearization of ``f <= 0`` over a grid of
    ``region`` (plus ``extra_points``).

    For max-affine ``f`` every generated pair is ``(c_j, -d_j)`` for a
    piece active somewhere on the grid; the pair is emitted exactly.
    """
    if region.n != f.n:
        raise DimensionError("region and function differ in dimension")
    Z = region.grid(grid_per_axis)
    if extra_points is not None:
        Z = np.vstack([Z, np.asarray(extra_points, dtype=float).reshape(-1, f.n)])
    if isinstance(f, MaxAffine):
        used = f.active_pieces(Z, tol).any(axis=0)
        pts = np.hstack([f.C[used], -f.d[used, None]])
    elif isinstance(f, Quadratic):
        G = f.gradients(Z)
        pts = np.hstack([G, (np.einsum("ij,ij->i", G, Z) - f.values(Z))[:, None]])
    else:
        rows = []
        for z in Z:
            G = f.generators(z, tol)
            rows.append(np.hstack([G, (G @ z - f(z))[:, None]]))
        pts = np.vstack(rows)
    return LinearSystem(f.n, PointCloud(pts), spec)


def dist_to_sublevel(x, f: ConvexFunction, tol: ToleranceConfig = DEFAULT_TOL):
    """Euclidean ``(y, d(x, L(f)))``.

    Max-affine sublevel sets are projected onto exactly. Other functions
    go through a conic solve, accurate to about ``CONIC_TOL``.
    """
    x = f._point(x)
    if f(x) <= 0.0:
        return x.copy(), 0.0
    if isinstance(f, MaxAffine):
        return project_polyhedron(x, sublevel_polyhedron(f), L2, tol)
    import cvxpy as cp

    y = cp.Variable(f.n)
    y = _solve_conic(f, cp.Minimize(cp.sum_squares(y - x)), y)
    return y, float(np.linalg.norm(y - x))


@dataclass(frozen=True)
class ConvexInstance:
    """Nominal convex inequality ``f0(x) <= 0`` at a feasible point ``x0``.

    ``E0`` is ``L(f0)`` enlarged by ``alpha0``; ``E`` adds a further
    ``alpha``. Both are represented by boxes containing them.
    """

    f0: ConvexFunction
    x0: np.ndarray
    alpha0: float
    alpha: float
    grid: int = DEFAULT_GRID
    tol: ToleranceConfig = field(default=DEFAULT_TOL, compare=False)

    def __post_init__(self):
        x0 = self.f0._point(self.x0)
        object.__setattr__(self, "x0", x0)
        if not (self.alpha0 > 0 and self.alpha > 0):
            raise InputError("alpha0 and alpha must be positive")
        if self.grid < 2:
            raise InputError("grid must be >= 2")
        if self.f0(x0) > self.tol.feas_tol:
            raise PreconditionError(f"x0 is infeasible: f0(x0) = {self.f0(x0):.3e}")
        object.__setattr__(self, "_bbox", sublevel_bbox(self.f0, self.tol))

    @property
    def n(self) -> int:
        return self.f0.n

    @property
    def sublevel_box(self):
        return self._bbox

    @property
    def E0_box(self) -> BoxRegion:
        return _box_around(*self._bbox, self.alpha0)

    @property
    def E_box(self) -> BoxRegion:
        return _box_around(*self._bbox, self.alpha0 + self.alpha)

    def to_json(self) -> dict:
        return {
            "f0": self.f0.to_json(),
            "x0": self.x0.tolist(),
            "alpha0": self.alpha0,
            "alpha": self.alpha,
            "grid": self.grid,
        }

    @classmethod
    def from_json(cls, data: dict, tol: ToleranceConfig = DEFAULT_TOL) -> "ConvexInstance":
        return cls(function_from_json(data["f0"]), data["x0"], float(data["alpha0"]),
                   float(data["alpha"]), int(data.get("grid", DEFAULT_GRID)), tol)


def rho(box: BoxRegion) -> float:
    """``max{1 + ||x||_2 : x in box}``, attained at a corner."""
    return float(1.0 + np.linalg.norm(box.corners(), axis=1).max())


@dataclass
class Kappa0Result:
    kappa0: float
    system: LinearSystem
    report: ModulusReport


def kappa0(inst: ConvexInstance, tol: ToleranceConfig = DEFAULT_TOL) -> Kappa0Result:
    """Lipschitz constant of the linearized nominal system at ``x0``.

    The system is built over the ``E0`` box, with ``x0`` added to the grid
    so that its own linearization row is present, and measured in the
    Euclidean norm.
    """
    sys0 = linearize(inst.f0, inst.E0_box, inst.grid, tol, extra_points=inst.x0)
    report = lipschitz_modulus(sys0, inst.x0, tol)
    return Kappa0Result(report.modulus, sys0, report)


def slater_margin(f0: ConvexFunction, search_box: BoxRegion, grid: int = DEFAULT_GRID):
    """``(min f0 on the grid, argmin)``; a negative margin certifies a
    Slater point."""
    Z = search_box.grid(grid)
    v = f0.values(Z)
    i = int(np.argmin(v))
    return float(v[i]), Z[i].copy()


def _offset_boundary(f0: ConvexFunction, r: float, tol: ToleranceConfig) -> np.ndarray:
    """Points of the boundary of ``L(f0) + r B`` (Euclidean ball)."""
    n = f0.n
    if n == 1:
        lo, hi = sublevel_bbox(f0, tol)
        return np.array([[lo[0] - r], [hi[0] + r]])
    if n == 2:
        th = np.linspace(0.0, 2 * np.pi, ANGLES_2D, endpoint=False)
        dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    else:
        rng = np.random.default_rng(0)
        dirs = rng.standard_normal((DIRECTIONS_ND, n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    if isinstance(f0, MaxAffine):
        V = sublevel_polyhedron(f0).vertices()
        if len(V) == 0:
            raise InputError("sublevel set has no vertices")
        normals = f0.C / np.linalg.norm(f0.C, axis=1, keepdims=True)
        dirs = np.vstack([dirs, normals])
        pts = [V[np.argmax(V @ nu)] + r * nu for nu in dirs]
        if n == 2:
            # flat sides of the offset set: translated edges of the polygon
            t = np.linspace(0.0, 1.0, 201)[:, None]
            for nu in normals:
                h = V @ nu
                face = V[h >= h.max() - 1e-9]
                if len(face) >= 2:
                    a, b = face[0], face[-1]
                    pts.extend(a + t * (b - a) + r * nu)
        return np.array(pts)
    return np.array([support_point(f0, nu, tol) + r * nu for nu in dirs])


def safe_radius(inst: ConvexInstance, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """``eta = m / 4`` with ``m`` the minimum of ``f0`` on the boundary of
    ``L(f0) + (alpha0 / 2) B``."""
    B = _offset_boundary(inst.f0, 0.5 * inst.alpha0, tol)
    m = float(inst.f0.values(B).min())
    if m <= tol.solver_tol:
        raise DegenerateInstanceError(f"boundary minimum m = {m:.3e} is not positive")
    return m / 4.0


def gap_bound_check(f1: ConvexFunction, f2: ConvexFunction, K1: BoxRegion, K2: BoxRegion,
                    grid: int = DEFAULT_GRID, tol: ToleranceConfig = DEFAULT_TOL) -> CheckResult:
    """Compare ``d_H(U1, U2)`` for the linearizations over ``K1``, ``K2``
    with ``rho d_H(df1(K1), df2(K2)) + d_{K1 u K2}(f1, f2)``.

    Norms are Euclidean; ``d_{K1 u K2}`` is taken over the smallest box
    containing both regions, with ``rho`` from that box's corners.
    """
    U1 = linearize(f1, K1, grid, tol)
    U2 = linearize(f2, K2, grid, tol)
    lhs = hausdorff(U1.U, U2.U, L2, "coeff")
    K = K1.hull(K2)
    r = rho(K)
    dsub = hausdorff(subdiff_image(f1, K1, grid, tol), subdiff_image(f2, K2, grid, tol), L2, "dual")
    dK, exact = sup_distance(f1, f2, K, grid, tol)
    rhs = r * dsub + dK
    return CheckResult(
        lhs=lhs,
        rhs=rhs,
        holds=lhs <= rhs + tol.feas_tol,
        details={"rho": r, "d_H_subdiff": dsub, "d_K": dK, "d_K_exact": exact},
    )


def delta0_surrogate(inst: ConvexInstance, eps: float | None = None,
                     tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Heuristic admissible perturbation size ``min(eta, alpha^2[, (eps/4)^2])``."""
    gate = min(safe_radius(inst, tol), inst.alpha**2)
    if eps is not None:
        gate = min(gate, (eps / 4.0) ** 2)
    return gate


def convex_lipschitz_check(inst: ConvexInstance, kappa: float, f1: ConvexFunction,
                           f2: ConvexFunction, x1, delta: float,
                           tol: ToleranceConfig = DEFAULT_TOL, differentiable: bool = False,
                           eps: float | None = None, kappa0_value: float | None = None,
                           delta0: float | None = None) -> CheckResult:
    """Check ``d(x1, L(f2)) <= kappa (rho d_H(df1(S), df2(S)) + d_E(f1, f2))``.

    ``S`` is the ``E0`` box enlarged by ``sqrt(delta)``, or the ``E0`` box
    itself when ``differentiable`` is set. Hypotheses are checked first and
    reported through ``hypotheses_met`` / ``violations``; the inequality is
    evaluated regardless so that callers can inspect it.
    """
    x1 = inst.f0._point(x1)
    if f1.n != inst.n or f2.n != inst.n:
        raise DimensionError("perturbed functions differ in dimension from f0")
    violations = []
    k0 = kappa0(inst, tol).kappa0 if kappa0_value is None else kappa0_value
    if not kappa > k0:
        violations.append(f"kappa={kappa} does not exceed kappa0={k0}")
    if delta <= 0:
        violations.append("delta must be positive")
    gate = delta0_surrogate(inst, eps, tol) if delta0 is None else delta0
    if delta > gate:
        violations.append(f"delta={delta:.3g} exceeds the admissible size {gate:.3g}")
    E = inst.E_box
    for name, f in (("f1", f1), ("f2", f2)):
        d, exact = sup_distance(f, inst.f0, E, inst.grid, tol)
        if not within(d, delta, exact):
            violations.append(f"d_E({name}, f0)={d:.3g} exceeds delta={delta:.3g}")
    step = float(np.linalg.norm(x1 - inst.x0))
    if step > delta * (1 + 1e-12):
        violations.append(f"||x1 - x0||={step:.3g} exceeds delta")
    if f1(x1) > tol.feas_tol:
        violations.append(f"x1 is infeasible for f1 (f1(x1)={f1(x1):.3g})")

    _, lhs = dist_to_sublevel(x1, f2, tol)
    S = inst.E0_box if differentiable else inst.E0_box.inflate(math.sqrt(max(delta, 0.0)))
    dsub = hausdorff(subdiff_image(f1, S, inst.grid, tol), subdiff_image(f2, S, inst.grid, tol),
                     L2, "dual")
    dE, exact = sup_distance(f1, f2, E, inst.grid, tol)
    r = rho(E)
    rhs = kappa * (r * dsub + dE)
    return CheckResult(
        lhs=lhs,
        rhs=rhs,
        holds=lhs <= rhs + tol.feas_tol,
        hypotheses_met=not violations,
        violations=violations,
        details={"rho": r, "d_H_subdiff": dsub, "d_E": dE, "d_E_exact": exact,
                 "kappa": kappa, "kappa0": k0, "delta": delta},
    )
