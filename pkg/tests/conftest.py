import numpy as np
import pytest
from scipy.spatial import Delaunay

from lipmod.linsys import LinearSystem


def random_feasible_system(rng, n=None, m=None, spec="l2", active_frac=0.5):
    """System ``a'x <= b`` built around a known feasible ``x0``; roughly
    ``active_frac`` of the rows are active at ``x0``."""
    n = int(rng.integers(1, 5)) if n is None else n
    m = int(rng.integers(1, 13)) if m is None else m
    x0 = rng.uniform(-2, 2, n)
    A = rng.standard_normal((m, n))
    s = np.abs(rng.standard_normal(m))
    s[rng.random(m) < active_frac] = 0.0
    b = A @ x0 + s
    return LinearSystem.from_points(np.hstack([A, b[:, None]]), spec), x0


def _zoom(f, member, center, radius, levels=6, per_axis=201, shrink=10.0):
    """Minimise ``f`` over grid points satisfying ``member`` on successively
    finer square windows. Returns the best value found (an upper bound)."""
    best_val, best = np.inf, None
    c, r = np.asarray(center, dtype=float), float(radius)
    for _ in range(levels):
        ax = [np.linspace(ci - r, ci + r, per_axis) for ci in c]
        X, Y = np.meshgrid(*ax, indexing="ij")
        Z = np.stack([X.ravel(), Y.ravel()], axis=1)
        ok = member(Z)
        if ok.any():
            vals = f(Z[ok])
            i = int(np.argmin(vals))
            if vals[i] < best_val:
                best_val, best = float(vals[i]), Z[ok][i]
        if best is not None:
            c = best
        r /= shrink
    return best_val


def grid_min_norm(G, q):
    """Smallest ``q``-norm over ``conv G`` (2-D, G in general position)."""
    tri = Delaunay(G)
    lo, hi = G.min(axis=0), G.max(axis=0)
    return _zoom(
        lambda Z: np.linalg.norm(Z, ord=q, axis=1),
        lambda Z: tri.find_simplex(Z, tol=1e-12) >= 0,
        0.5 * (lo + hi),
        0.5 * float((hi - lo).max()) * 1.01,
    )


def grid_projection_distance(x, P, q, feasible_point):
    """``min ||y - x||_q`` over ``y in P`` by zooming grids."""
    # any minimiser y has ||y - x||_inf <= ||y - x||_q <= ||z - x||_q
    r = float(np.linalg.norm(feasible_point - x, ord=q)) * 1.01 + 1e-9
    return _zoom(
        lambda Z: np.linalg.norm(Z - x, ord=q, axis=1),
        lambda Z: (Z @ P.A.T - P.b <= 1e-12).all(axis=1),
        x,
        r,
        levels=12,
        per_axis=301,
        shrink=4.0,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


FIXTURES = {
    "single": ([[1.0, 1.0]], [1.0], 2.0, "finite"),
    "slater": ([[1.0, 1.0], [-1.0, 1.0]], [0.0], 0.0, "zero"),
    "ssc_fail": ([[1.0, 0.0], [-1.0, 0.0]], [0.0], np.inf, "infinite"),
    "planar": ([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [-1.0, -1.0, 0.0]], [1.0, 0.0], 2.0, "finite"),
}
