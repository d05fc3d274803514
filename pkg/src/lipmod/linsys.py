"""Linear systems parameterised by their coefficient set.

A :class:`LinearSystem` is the system ``{a'x <= b : (a, b) in U}`` for a
finite cloud ``U`` in R^{n+1}. The Lipschitz modulus of the feasible-set
mapping at ``(U, x0)`` is ``(||x0|| + 1) / d_*(0, C)`` where ``C`` collects
the ``u`` with ``(u, u'x0)`` in ``conv U``.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .errors import DimensionError, InfeasibleError, PreconditionError, SolverError
from .hulls import (
    PointCloud,
    Polyhedron,
    is_feasible,
    min_norm_point,
    project_polyhedron,
    solve_lp,
)
from .norms import L2, NormSpec, norm_value

log = logging.getLogger(__name__)

DEFAULT_BOX_RADIUS = 1e6


@dataclass(frozen=True)
class LinearSystem:
    """``{x in R^n : a'x <= b for (a, b) in U}``."""

    n: int
    U: PointCloud
    spec: NormSpec = L2

    def __post_init__(self):
        U = PointCloud.coerce(self.U)
        if U.dim != self.n + 1:
            raise DimensionError(f"coefficient points must have dimension n+1 = {self.n + 1}")
        if self.n < 1:
            raise DimensionError("n must be >= 1")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "spec", NormSpec.parse(self.spec))

    @classmethod
    def from_points(cls, points, spec: NormSpec | str = L2) -> "LinearSystem":
        U = PointCloud(points)
        return cls(U.dim - 1, U, NormSpec.parse(spec))

    @property
    def gradients(self) -> np.ndarray:
        return self.U.points[:, :-1]

    @property
    def rhs(self) -> np.ndarray:
        return self.U.points[:, -1]

    @property
    def gradient_bound(self) -> float:
        """``sup ||a||_*`` over the rows; finite for any finite ``U``."""
        return float(max(norm_value(a, self.spec, "dual") for a in self.gradients))

    def polyhedron(self) -> Polyhedron:
        return Polyhedron(self.gradients, self.rhs)

    def slacks(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.n:
            raise DimensionError(f"point has dimension {x.shape[0]}, expected {self.n}")
        return self.rhs - self.gradients @ x

    def is_consistent(self, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        return is_feasible(self.polyhedron(), tol)


@dataclass
class CSetDistance:
    dist: float
    empty: bool
    zero_in: bool
    witness: np.ndarray | None
    active: list = field(default_factory=list)


@dataclass
class SSCResult:
    margin: float
    point: np.ndarray | None
    box_radius: float
    box_binding: bool


@dataclass
class ModulusReport:
    modulus: float
    c_distance: float
    c_empty: bool
    zero_in_c: bool
    active_indices: list
    ssc_margin: float
    classification: str
    x0: np.ndarray
    strong_slater_point: np.ndarray | None = None
    box_radius: float = DEFAULT_BOX_RADIUS
    box_binding: bool = False
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "classification": self.classification,
            "c_distance": self.c_distance,
            "c_empty": self.c_empty,
            "zero_in_c": self.zero_in_c,
            "active_indices": list(self.active_indices),
            "ssc_margin": self.ssc_margin,
            "strong_slater_point": self.strong_slater_point,
            "box_radius": self.box_radius,
            "box_binding": self.box_binding,
            "x0": self.x0,
            "warnings": list(self.warnings),
        }


def dist_to_feasible(x, sys: LinearSystem, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """``d(x, F(U))`` in the primal norm of ``sys.spec``."""
    P = sys.polyhedron()
    x = np.asarray(x, dtype=float).reshape(-1)
    if P.violation(x) <= 0.0:
        return 0.0
    try:
        return project_polyhedron(x, P, sys.spec, tol)[1]
    except InfeasibleError as exc:
        raise InfeasibleError("the linear system is inconsistent") from exc


def _check_feasible_point(x0, sys: LinearSystem, tol: ToleranceConfig):
    viol = float(-sys.slacks(x0).min())
    if viol > tol.feas_tol:
        raise PreconditionError(f"x0 violates the system by {viol:.3e} > feas_tol")


def active_set(x0, sys: LinearSystem, tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """Indices of rows with ``|b - a'x0| <= active_tol``."""
    _check_feasible_point(x0, sys, tol)
    s = sys.slacks(x0)
    return [int(i) for i in np.nonzero(np.abs(s) <= tol.active_tol)[0]]


def c_set_distance(sys: LinearSystem, x0, tol: ToleranceConfig = DEFAULT_TOL) -> CSetDistance:
    """``min ||u||_*`` over ``C``, via the hull of active gradients.

    Feasibility of ``x0`` makes every slack nonnegative, so convex weights
    reproducing ``u'x0`` on the right-hand side can only sit on active rows.
    :func:`c_set_distance_full` solves the unreduced program instead.
    """
    active = active_set(x0, sys, tol)
    if not active:
        return CSetDistance(math.inf, True, False, None, [])
    res = min_norm_point(sys.gradients[active], sys.spec, tol)
    # weights refer to the deduplicated active gradients; map back to rows
    grads = PointCloud(sys.gradients[active]).points
    witness = np.zeros(len(sys.U))
    for w, g in zip(res.weights, grads):
        if w == 0:
            continue
        for i in active:
            if np.array_equal(sys.gradients[i], g):
                witness[i] = w
                break
    return CSetDistance(res.dist, False, res.dist <= tol.solver_tol, witness, active)


def c_set_distance_full(sys: LinearSystem, x0, tol: ToleranceConfig = DEFAULT_TOL) -> CSetDistance:
    """Fallback: ``min ||sum_i lam_i a_i||_*`` over the simplex with
    ``sum_i lam_i (b_i - a_i'x0) = 0``, solved as a conic program.

    Independent of the active-set reduction and of the in-house solvers.
    """
    import cvxpy as cp

    _check_feasible_point(x0, sys, tol)
    s = np.maximum(sys.slacks(x0), 0.0)
    A = sys.gradients
    m = A.shape[0]
    lam = cp.Variable(m, nonneg=True)
    cons = [cp.sum(lam) == 1]
    # scale so the equality is judged relative to the slack magnitudes
    smax = float(s.max())
    if smax > 0:
        cons.append((s / smax) @ lam == 0)
    u = A.T @ lam
    q = sys.spec.dual_p
    objective = cp.Minimize(cp.norm(u, 1 if q == 1 else (2 if q == 2 else "inf")))
    prob = cp.Problem(objective, cons)
    try:
        with warnings.catch_warnings():
            # an inaccurate finish is reported through prob.status instead
            warnings.simplefilter("ignore", UserWarning)
            prob.solve(solver="CLARABEL", tol_gap_abs=1e-10, tol_gap_rel=1e-10,
                       tol_feas=1e-10, max_iter=500)
    except Exception as exc:  # noqa: BLE001  (solver-specific failures)
        raise SolverError(f"conic fallback failed: {exc}") from exc
    if prob.status not in ("optimal", "optimal_inaccurate"):
        if prob.status in ("infeasible", "infeasible_inaccurate"):
            return CSetDistance(math.inf, True, False, None, [])
        raise SolverError(f"conic fallback ended with status {prob.status}")
    w = np.clip(np.asarray(lam.value, dtype=float), 0.0, None)
    w /= w.sum()
    dist = float(norm_value(A.T @ w, sys.spec, "dual"))
    active = [int(i) for i in np.nonzero(s <= tol.active_tol)[0]]
    return CSetDistance(dist, False, dist <= max(tol.solver_tol, 1e-9), w, active)


def ssc_margin(sys: LinearSystem, box_radius: float = DEFAULT_BOX_RADIUS,
               tol: ToleranceConfig = DEFAULT_TOL) -> SSCResult:
    """Largest uniform slack ``eps`` with ``a_i'x + eps <= b_i`` over a box.

    ``eps > 0`` certifies the strong Slater condition; the maximiser is a
    strong Slater point.
    """
    if not box_radius > 0:
        raise PreconditionError("box_radius must be positive")
    n = sys.n
    A = np.hstack([sys.gradients, np.ones((len(sys.U), 1))])
    c = np.zeros(n + 1)
    c[-1] = 1.0
    lo = np.concatenate([np.full(n, -box_radius), [-np.inf]])
    hi = np.concatenate([np.full(n, box_radius), [np.inf]])
    res = solve_lp(c, Polyhedron(A, sys.rhs), (lo, hi), maximize=True, tol=tol)
    if not res.optimal:
        raise SolverError(f"strong Slater LP ended with status {res.status}")
    x = res.x[:n]
    binding = bool(np.abs(x).max() >= box_radius * (1 - 1e-12))
    margin = float(res.x[-1])
    # the simplex is accurate to about feas_tol relative to the data scale
    if abs(margin) <= tol.feas_tol * (1.0 + float(np.abs(sys.U.points).max())):
        margin = 0.0
    return SSCResult(margin, x, float(box_radius), binding)


def _ratio(num: float, den: float) -> float:
    if den == math.inf:
        return 0.0
    if den == 0.0:
        return math.inf
    return num / den


def lipschitz_modulus(sys: LinearSystem, x0, tol: ToleranceConfig = DEFAULT_TOL,
                      box_radius: float = DEFAULT_BOX_RADIUS) -> ModulusReport:
    """Exact Lipschitz modulus of the feasible-set mapping at ``(U, x0)``.

    Points violating the system by at most ``sqrt(feas_tol)`` are first
    projected onto the feasible set and a warning is recorded; larger
    violations raise :class:`PreconditionError`.
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    warnings = []
    viol = float(-sys.slacks(x0).min())
    if viol > tol.feas_tol:
        if viol > math.sqrt(tol.feas_tol):
            raise PreconditionError(f"x0 is infeasible (violation {viol:.3e})")
        x0, _ = project_polyhedron(x0, sys.polyhedron(), sys.spec, tol)
        msg = f"x0 violated the system by {viol:.3e}; replaced by its projection"
        log.warning(msg)
        warnings.append(msg)
    cs = c_set_distance(sys, x0, tol)
    ssc = ssc_margin(sys, box_radius, tol)
    if cs.empty:
        modulus, cls = 0.0, "zero"
    elif cs.zero_in:
        modulus, cls = math.inf, "infinite"
    else:
        modulus, cls = _ratio(norm_value(x0, sys.spec, "primal") + 1.0, cs.dist), "finite"
    c_dist = 0.0 if cs.zero_in else cs.dist
    return ModulusReport(
        modulus=modulus,
        c_distance=c_dist,
        c_empty=cs.empty,
        zero_in_c=cs.zero_in,
        active_indices=cs.active,
        ssc_margin=ssc.margin,
        classification=cls,
        x0=x0,
        strong_slater_point=ssc.point if ssc.margin > 0 else None,
        box_radius=ssc.box_radius,
        box_binding=ssc.box_binding,
        warnings=warnings,
    )
