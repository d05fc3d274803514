"""Monte Carlo lower bounds for the Lipschitz and calmness moduli.

Pairs ``(U1, U2)`` are drawn from the Hausdorff ball of radius ``delta``
around the nominal coefficient set, a feasible point ``x1`` of ``U1`` is
taken near ``x0``, and the ratio ``d(x1, F(U2)) / d_H(U1, U2)`` is
recorded. Random numbers are a fixed function of ``(seed, delta index, sample
index)``, so results do not depend on the number of worker threads.
Jitter-only sweeps draw each radius as one batch (row ``i`` belongs to
sample ``i``) and evaluate it with array operations; sweeps that add or
drop points give every sample its own generator.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .config import DEFAULT_TOL, SweepConfig, ToleranceConfig
from .errors import InfeasibleError, NumericalError
from .hulls import PointCloud, Polyhedron, project_polyhedron
from .linsys import LinearSystem, active_set
from .norms import L2, NormSpec, coeff_norms, lp_norm, unit_dual_aligned

MIN_DENOMINATOR = 1e-12
CSV_COLUMNS = ("delta", "max_ratio", "samples_used", "discarded")


def _random_coeff_vectors(rng: np.random.Generator, k: int, dim: int, delta: float,
                          spec: NormSpec) -> np.ndarray:
    """``k`` random vectors of coefficient norm at most ``delta``."""
    W = rng.standard_normal((k, dim))
    W /= np.maximum(coeff_norms(W, spec), 1e-300)[:, None]
    return W * (delta * rng.random(k))[:, None]


def _perturb_points(P0: np.ndarray, delta: float, rng: np.random.Generator, kinds,
                    spec: NormSpec) -> np.ndarray:
    P = P0
    k, dim = P0.shape
    if "jitter" in kinds:
        P = P0 + _random_coeff_vectors(rng, k, dim, delta, spec)
    if "add_point" in kinds:
        j = int(rng.integers(k))
        P = np.vstack([P, P0[j] + _random_coeff_vectors(rng, 1, dim, delta, spec)])
    if "drop_point" in kinds and len(P) > 1:
        j = int(rng.integers(len(P)))
        rest = np.delete(P, j, axis=0)
        if _hausdorff(rest, P0, spec) <= delta:
            P = rest
    d = _hausdorff(P, P0, spec)
    if d > delta * (1 + 1e-12):
        raise AssertionError(f"perturbation left the Hausdorff ball: {d} > {delta}")
    return P


def perturb_cloud(U0, delta: float, rng: np.random.Generator, kinds=("jitter",),
                  spec: NormSpec = L2) -> PointCloud:
    """Random ``U`` with ``d_H(U, U0) <= delta``.

    ``jitter`` moves every point, ``add_point`` appends a point near an
    existing one and ``drop_point`` removes a point that the remaining ones
    still cover within ``delta``. The Hausdorff bound is verified on the
    result.
    """
    U0 = PointCloud.coerce(U0)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0:
        return U0
    return PointCloud(_perturb_points(U0.points, delta, rng, kinds, spec))


def _hausdorff(A: np.ndarray, B: np.ndarray, spec: NormSpec) -> float:
    q = spec.dual_p
    D = kernels.pairwise_distances(A, B, 0 if q == np.inf else int(q), True)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def _dist(x, P: Polyhedron, spec: NormSpec, tol) -> float:
    if P.violation(x) <= 0.0:
        return 0.0
    try:
        return project_polyhedron(x, P, spec, tol)[1]
    except InfeasibleError:
        return math.inf


def _ratio(x1, U1: np.ndarray, U2: np.ndarray, spec, tol) -> float | None:
    den = _hausdorff(U1, U2, spec)
    if den < MIN_DENOMINATOR:
        return None
    return _dist(x1, Polyhedron(U2[:, :-1], U2[:, -1]), spec, tol) / den


@dataclass
class DeltaRow:
    delta: float
    max_ratio: float
    samples_used: int
    discarded: int
    calm_ratio: float = 0.0
    adversarial_ratio: float = 0.0


@dataclass
class EstimateResult:
    """``estimate`` is the largest ratio seen at the smallest radius."""

    estimate: float
    calm_estimate: float
    rows: list = field(default_factory=list)
    mode: str = "lip"

    @property
    def per_delta(self) -> list:
        return [(r.delta, r.max_ratio) for r in self.rows]

    @property
    def diverging(self) -> bool:
        return math.isinf(self.estimate)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([repr(r.delta), repr(r.max_ratio), r.samples_used, r.discarded])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "calm_estimate": self.calm_estimate,
            "mode": self.mode,
            "diverging": self.diverging,
            "per_delta": [
                {"delta": r.delta, "max_ratio": r.max_ratio, "samples_used": r.samples_used,
                 "discarded": r.discarded, "calm_ratio": r.calm_ratio,
                 "adversarial_ratio": r.adversarial_ratio}
                for r in self.rows
            ],
        }


def adversarial_pairs(sys0: LinearSystem, x0, delta: float, tol: ToleranceConfig = DEFAULT_TOL):
    """Deterministic pairs ``(U0, U2)``: one active row ``(a, b)`` is
    replaced by ``(a + delta w, b - delta)`` with ``||w||_* = 1`` and
    ``w'x0 = ||x0||``. The change has coefficient norm exactly ``delta``."""
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    w = unit_dual_aligned(x0, sys0.spec)
    tilt = np.concatenate([delta * w, [-delta]])
    U0 = sys0.U.points
    for i in active_set(x0, sys0, tol):
        U2 = U0.copy()
        U2[i] = U2[i] + tilt
        yield U0, U2


def _sample(sys0: LinearSystem, x0, delta: float, seed: tuple, cfg: SweepConfig, tol):
    """One draw; returns ``(lip ratio, calm ratio)`` or ``None`` if discarded."""
    rng = np.random.default_rng(seed)
    spec = sys0.spec
    U0 = sys0.U
    U1 = _perturb_points(U0.points, delta, rng, cfg.perturbation_kinds, spec)
    P1 = Polyhedron(U1[:, :-1], U1[:, -1])
    g = rng.standard_normal(sys0.n)
    g *= 0.5 * delta * rng.random() / max(lp_norm(g, spec.p), 1e-300)
    try:
        x1, _ = project_polyhedron(x0 + g, P1, spec, tol)
    except InfeasibleError:
        return None
    if lp_norm(x1 - x0, spec.p) > delta:
        return None
    calm = _ratio(x1, U1, U0.points, spec, tol)
    lip = None
    if cfg.mode == "lip":
        U2 = _perturb_points(U0.points, delta, rng, cfg.perturbation_kinds, spec)
        lip = _ratio(x1, U1, U2, spec, tol)
    return lip, calm


def _batch_hausdorff(A: np.ndarray, B: np.ndarray, spec: NormSpec) -> np.ndarray:
    """Row-wise ``d_H(A[s], B[s])`` for stacks of equal-size clouds."""
    diff = A[:, :, None, :] - B[:, None, :, :]
    D = np.maximum(lp_norm(diff[..., :-1], spec.dual_p, axis=-1), np.abs(diff[..., -1]))
    return np.maximum(D.min(axis=2).max(axis=1), D.min(axis=1).max(axis=1))


def _batch_intervals(U: np.ndarray):
    """Bounds of the one-dimensional feasible sets of a stack of systems."""
    a, b = U[..., 0], U[..., 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = b / a
    hi = np.where(a > 0, r, np.inf).min(axis=1)
    lo = np.where(a < 0, r, -np.inf).max(axis=1)
    empty = (lo > hi) | np.any((a == 0) & (b < 0), axis=1)
    return lo, hi, empty


def _batch_project(X: np.ndarray, U: np.ndarray, spec: NormSpec, tol):
    """Projections of ``X[s]`` onto ``F(U[s])``; ``nan`` rows where empty."""
    if X.shape[1] == 1:
        lo, hi, empty = _batch_intervals(U)
        Y = np.clip(X[:, 0], lo, hi)[:, None]
        Y[empty] = np.nan
        return Y
    Y = X.copy()
    viol = (np.einsum("skn,sn->sk", U[..., :-1], X) - U[..., -1]).max(axis=1)
    for s in np.nonzero(viol > 0.0)[0]:
        try:
            Y[s] = project_polyhedron(X[s], Polyhedron(U[s, :, :-1], U[s, :, -1]), spec, tol)[0]
        except InfeasibleError:
            Y[s] = np.nan
    return Y


def _batch_ratio(X, U1, U2, spec, tol) -> np.ndarray:
    den = _batch_hausdorff(U1, U2, spec)
    Y = _batch_project(X, U2, spec, tol)
    num = np.where(np.isnan(Y[:, 0]), np.inf, lp_norm(Y - X, spec.p, axis=1))
    out = np.full(len(X), np.nan)
    ok = den >= MIN_DENOMINATOR
    out[ok] = num[ok] / den[ok]
    return out


def _batch_jitter(P0, delta, rng, S, spec):
    k, dim = P0.shape
    W = rng.standard_normal((S * k, dim))
    W /= np.maximum(coeff_norms(W, spec), 1e-300)[:, None]
    W *= delta * rng.random(S * k)[:, None]
    U = P0[None, :, :] + W.reshape(S, k, dim)
    d = _batch_hausdorff(U, np.broadcast_to(P0, U.shape), spec)
    if np.any(d > delta * (1 + 1e-12)):
        raise AssertionError("perturbation left the Hausdorff ball")
    return U


def _sweep_jitter(sys0: LinearSystem, x0, delta: float, seed: tuple, cfg: SweepConfig, tol):
    """Vectorised jitter-only sweep; ``(lip, calm, kept)`` arrays, ``nan``
    marking skipped ratios."""
    rng = np.random.default_rng(seed)
    S, spec, n = cfg.samples_per_delta, sys0.spec, sys0.n
    P0 = np.array(sys0.U.points)
    U1 = _batch_jitter(P0, delta, rng, S, spec)
    G = rng.standard_normal((S, n))
    G *= (0.5 * delta * rng.random(S) / np.maximum(lp_norm(G, spec.p, axis=1), 1e-300))[:, None]
    U2 = _batch_jitter(P0, delta, rng, S, spec) if cfg.mode == "lip" else None
    X1 = _batch_project(x0[None, :] + G, U1, spec, tol)
    kept = ~np.isnan(X1[:, 0])
    kept[kept] = lp_norm(X1[kept] - x0, spec.p, axis=1) <= delta
    X1, U1 = X1[kept], U1[kept]
    calm = _batch_ratio(X1, U1, np.broadcast_to(P0, U1.shape), spec, tol)
    lip = _batch_ratio(X1, U1, U2[kept], spec, tol) if U2 is not None else np.full(len(X1), np.nan)
    return lip, calm, int(kept.sum())


def _nanmax(a) -> float:
    a = np.asarray(a, dtype=float)
    a = a[~np.isnan(a)]
    return float(a.max()) if a.size else 0.0


def _threads(cfg: SweepConfig) -> int:
    env = os.environ.get("LIPMOD_THREADS")
    cap = int(env) if env and env.isdigit() and int(env) > 0 else cfg.threads
    return max(1, min(cfg.threads, cap))


def _max(values) -> float:
    vals = [v for v in values if v is not None]
    return max(vals) if vals else 0.0


def _sweep_samples(sys0, x0, delta, di, cfg: SweepConfig, tol, nthreads):
    seeds = [(cfg.seed, di, i) for i in range(cfg.samples_per_delta)]

    def run(seed):
        try:
            return _sample(sys0, x0, delta, seed, cfg, tol)
        except NumericalError:
            return None

    if nthreads > 1:
        with ThreadPoolExecutor(nthreads) as pool:
            out = list(pool.map(run, seeds, chunksize=256))
    else:
        out = [run(seed) for seed in seeds]
    kept = [o for o in out if o is not None]
    return _max(o[0] for o in kept), _max(o[1] for o in kept), len(kept)


def empirical_lip(sys0: LinearSystem, x0, cfg: SweepConfig = SweepConfig(),
                  tol: ToleranceConfig = DEFAULT_TOL) -> EstimateResult:
    """Sweep ``cfg.deltas`` and return the empirical modulus estimates.

    In ``lip`` mode both parameters move; calmness pairs ``(U1, U0)`` are
    evaluated alongside and also enter the Lipschitz maximum, so the calm
    estimate never exceeds the Lipschitz one. The adversarial pairs of
    :func:`adversarial_pairs` are included in ``lip`` mode. ``calm`` mode
    draws the same ``U1`` and ``x1`` as ``lip`` mode and keeps only the
    pairs ``(U1, U0)``. An infinite ratio (the
    perturbed system becomes inconsistent) marks the estimate as diverging.
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    active_set(x0, sys0, tol)  # raises if x0 is infeasible
    nthreads = _threads(cfg)
    rows = []
    for di, delta in enumerate(cfg.deltas):
        adv = 0.0
        if cfg.mode == "lip":
            adv = _max(_ratio(x0, U1, U2, sys0.spec, tol)
                       for U1, U2 in adversarial_pairs(sys0, x0, delta, tol))
        if set(cfg.perturbation_kinds) == {"jitter"}:
            lip_r, calm_r, used = _sweep_jitter(sys0, x0, delta, (cfg.seed, di), cfg, tol)
            lip, calm = _nanmax(lip_r), _nanmax(calm_r)
        else:
            lip, calm, used = _sweep_samples(sys0, x0, delta, di, cfg, tol, nthreads)
        lip = max(lip, calm, adv) if cfg.mode == "lip" else calm
        rows.append(DeltaRow(delta, lip, used, cfg.samples_per_delta - used, calm, adv))
    last = rows[-1]
    return EstimateResult(last.max_ratio, last.calm_ratio, rows, cfg.mode)
