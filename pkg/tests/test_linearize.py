import math

import numpy as np
import pytest

from lipmod.convexfn import BoxRegion, MaxAffine, Quadratic, SumOf, exact_sup_distance
from lipmod.errors import DegenerateInstanceError, InfeasibleError, InputError, PreconditionError
from lipmod.hulls import hausdorff
from lipmod.linearize import (
    ConvexInstance,
    convex_lipschitz_check,
    dist_to_sublevel,
    gap_bound_check,
    kappa0,
    linearize,
    rho,
    safe_radius,
    slater_margin,
    sublevel_bbox,
    sublevel_polyhedron,
)
from lipmod.norms import L2

M = MaxAffine.from_pieces
F0 = M([[1, -1], [-1, -1]])  # |x| - 1
SQUARE = M([[1, 0, -1], [-1, 0, -1], [0, 1, -1], [0, -1, -1]])  # max(|x|, |y|) - 1


def test_sublevel_polyhedron_examples():
    assert sublevel_polyhedron(F0).interval() == (-1.0, 1.0)
    assert sublevel_polyhedron(M([[1, 0], [-1, 0]])).interval() == (0.0, 0.0)
    assert sublevel_polyhedron(M([[1, -1]])).interval() == (-math.inf, 1.0)
    with pytest.raises(InputError):
        sublevel_polyhedron(Quadratic([[1.0]]))


def test_linearize_examples():
    U = linearize(F0, BoxRegion([0.0], [2.0]), 9).U.points
    assert sorted(map(tuple, U)) == [(-1.0, 1.0), (1.0, 1.0)]
    assert linearize(M([[1, -1]]), BoxRegion([0.0], [2.0]), 9).U.points.tolist() == [[1, 1]]
    # f = x^2/2 at z in {-1, 0, 1}: (z, z*z - z^2/2) = (z, z^2/2)
    U = linearize(Quadratic([[1.0]]), BoxRegion([0.0], [1.0]), 3).U.points
    assert sorted(map(tuple, U)) == [(-1.0, 0.5), (0.0, 0.0), (1.0, 0.5)]


def test_linearize_sum_matches_pointwise_formula():
    f = SumOf([F0, Quadratic([[1.0]])])
    U = linearize(f, BoxRegion([0.0], [1.0]), 5).U.points
    for a, b in U:
        # every row must be tangent to f somewhere on the grid
        zs = np.linspace(-1, 1, 5)
        assert any(abs(b - (a * z - f([z]))) < 1e-12 for z in zs)


def test_sublevel_bbox():
    lo, hi = sublevel_bbox(SQUARE)
    np.testing.assert_allclose(lo, [-1, -1])
    np.testing.assert_allclose(hi, [1, 1])
    q = Quadratic(np.diag([2.0, 0.5]), [0, 0], -1.0)  # x^2 + y^2/4 <= 1
    lo, hi = sublevel_bbox(q)
    np.testing.assert_allclose(hi, [1, 2], atol=1e-9)
    lo, hi = sublevel_bbox(SumOf([q, M([[0, 0, 0]])]))  # same set via cutting planes
    np.testing.assert_allclose(hi, [1, 2], atol=1e-6)
    with pytest.raises(InputError):
        sublevel_bbox(M([[1, -1]]))
    with pytest.raises(InfeasibleError):
        sublevel_bbox(Quadratic([[1.0]], [0.0], 1.0))


def test_dist_to_sublevel_against_closed_forms_and_grid():
    ball = Quadratic(np.eye(2), [0, 0], -0.5)
    for x in ([2.0, 0.0], [3.0, -4.0], [0.1, 0.2]):
        _, d = dist_to_sublevel(x, ball)
        assert d == pytest.approx(max(np.linalg.norm(x) - 1, 0.0), abs=1e-6)
    f = SumOf([Quadratic([[1.0]], [0.0], -0.5), M([[1, 0], [-0.5, 0]])])
    zs = np.linspace(-3, 3, 600001)
    feasible = zs[f.values(zs[:, None]) <= 0]
    for x in (2.0, -2.5):
        assert dist_to_sublevel([x], f)[1] == pytest.approx(np.abs(feasible - x).min(), abs=1e-5)


def test_instance_validation():
    with pytest.raises(PreconditionError):
        ConvexInstance(F0, [2.0], 0.5, 0.5)
    with pytest.raises(InputError):
        ConvexInstance(F0, [0.0], 0.0, 0.5)
    with pytest.raises(InputError):
        ConvexInstance(M([[1, -1]]), [0.0], 0.5, 0.5)  # unbounded sublevel set
    inst = ConvexInstance(F0, [1.0], 0.5, 0.25)
    assert ConvexInstance.from_json(inst.to_json()) == inst
    np.testing.assert_allclose(inst.E0_box.hi, [1.5])
    np.testing.assert_allclose(inst.E_box.lo, [-1.75])


def test_kappa0_examples():
    assert kappa0(ConvexInstance(F0, [1.0], 0.5, 0.5)).kappa0 == pytest.approx(2.0)
    assert kappa0(ConvexInstance(F0, [0.0], 0.5, 0.5)).kappa0 == 0.0
    r = kappa0(ConvexInstance(M([[1, 0], [-1, 0]]), [0.0], 0.5, 0.5))
    assert r.kappa0 == math.inf and r.report.zero_in_c


def test_kappa0_quadratic():
    # x^2/2 - 1/2 <= 0 at x0 = 1: the row of x0 is (1, 1), so kappa0 = 2
    inst = ConvexInstance(Quadratic([[1.0]], [0.0], -0.5), [1.0], 0.5, 0.5)
    assert kappa0(inst).kappa0 == pytest.approx(2.0)


def test_kappa0_agrees_with_fallback():
    from lipmod.linsys import c_set_distance_full

    inst = ConvexInstance(F0, [1.0], 0.5, 0.5)
    res = kappa0(inst)
    full = c_set_distance_full(res.system, inst.x0)
    assert (1 + 1) / full.dist == pytest.approx(res.kappa0, abs=1e-7)


def test_slater_margin_examples():
    box = BoxRegion([0.0], [2.0])
    m, w = slater_margin(F0, box, 41)
    assert m == -1.0 and w.tolist() == [0.0]
    assert slater_margin(M([[1, 0], [-1, 0]]), box, 41)[0] == 0.0
    assert slater_margin(Quadratic([[2.0]], [0.0], 1.0), box, 41)[0] == 1.0


@pytest.mark.parametrize(
    "f0, x0",
    [
        (F0, [1.0]),
        (M([[1, 0], [-1, 0]]), [0.0]),
        (Quadratic([[1.0]], [0.0], -0.5), [1.0]),
        (SQUARE, [1.0, 1.0]),
        (SQUARE, [1.0, 0.0]),
    ],
)
def test_slater_iff_zero_not_in_c(f0, x0):
    inst = ConvexInstance(f0, x0, 0.5, 0.5)
    margin, _ = slater_margin(f0, inst.E0_box, inst.grid)
    assert (margin < 0) == (not kappa0(inst).report.zero_in_c)


@pytest.mark.parametrize(
    "f0, alpha0, eta",
    [(F0, 1.0, 0.125), (F0, 2.0, 0.25), (M([[2, -2], [-2, -2]]), 1.0, 0.25)],
)
def test_safe_radius_examples(f0, alpha0, eta):
    assert safe_radius(ConvexInstance(f0, [0.0], alpha0, 0.5)) == pytest.approx(eta, abs=1e-12)


def test_safe_radius_planar():
    # disk of radius 1 enlarged by 1/2: f0 = 1.125 - 0.5 = 0.625 on the boundary
    disk = ConvexInstance(Quadratic(np.eye(2), [0, 0], -0.5), [0.0, 0.0], 1.0, 0.5)
    assert safe_radius(disk) == pytest.approx(0.625 / 4, abs=1e-9)
    # the square's offset boundary is lowest on its rounded corners: m = (sqrt(2)/2)/2
    sq = ConvexInstance(SQUARE, [0.0, 0.0], 1.0, 0.5)
    assert safe_radius(sq) == pytest.approx(0.5 * math.sqrt(0.5) / 4, abs=1e-5)


def test_safe_radius_degenerate():
    with pytest.raises(DegenerateInstanceError):
        safe_radius(ConvexInstance(M([[1, 0], [-1, 0]]), [0.0], 1e-12, 0.5))


def test_gap_examples():
    K = BoxRegion([0.0], [1.0])
    A = M([[1, 0], [-1, 0]])
    r = gap_bound_check(A, A, K, K)
    assert r.lhs == 0.0 and r.rhs == 0.0 and r.holds
    r = gap_bound_check(A, M([[1, -0.3], [-1, -0.3]]), K, K)
    assert abs(r.lhs - 0.3) <= 1e-9 and abs(r.rhs - 0.3) <= 1e-9 and r.holds
    # hand computation: U1 = {(+-1, 0)}, U2 = {(+-0.9, 0)}, rho = 2
    r = gap_bound_check(A, M([[0.9, 0], [-0.9, 0]]), K, K)
    assert r.lhs == pytest.approx(0.1) and r.rhs == pytest.approx(2 * 0.1 + 0.1)


def test_gap_on_random_pairs_with_distinct_boxes(rng):
    for _ in range(40):
        n = int(rng.integers(1, 3))
        f1 = MaxAffine(rng.standard_normal((3, n)), rng.standard_normal(3))
        f2 = MaxAffine(f1.C + 0.2 * rng.standard_normal(f1.C.shape), f1.d + 0.2 * rng.standard_normal(3))
        K1 = BoxRegion(rng.standard_normal(n), rng.uniform(0.5, 2, n))
        K2 = BoxRegion(K1.center + 0.1 * rng.standard_normal(n), K1.half_widths)
        assert gap_bound_check(f1, f2, K1, K2, 21).holds


def test_region_enlargement_keeps_feasible_set(rng):
    for _ in range(20):
        C = rng.standard_normal((5, 2))
        f = MaxAffine(C, -np.abs(rng.standard_normal(5)) - 0.5)
        try:
            lo, hi = sublevel_bbox(f)
        except InputError:
            continue
        R = BoxRegion.from_bounds(lo - 0.5, hi + 0.5)
        V1 = linearize(f, R, 41).polyhedron().vertices()
        V2 = linearize(f, R.inflate(3.0), 41).polyhedron().vertices()
        assert hausdorff(V1, V2, L2, "primal") <= 1e-9


def test_sublevel_set_equals_linearized_set_within_safe_radius(rng):
    for f0 in (F0, SQUARE):
        inst = ConvexInstance(f0, np.zeros(f0.n), 1.0, 0.5)
        eta = safe_radius(inst)
        R = np.abs(np.vstack([inst.E_box.lo, inst.E_box.hi])).max()
        for _ in range(25):
            # per-piece change bounded by |dc|_1 R + |dd|, so d_E(f, f0) < 0.9 eta
            dC = rng.uniform(-1, 1, f0.C.shape)
            dd = rng.uniform(-1, 1, f0.d.shape)
            scale = 0.9 * eta / (np.abs(dC).sum(axis=1) * R + np.abs(dd)).max()
            f = MaxAffine(f0.C + scale * dC, f0.d + scale * dd)
            assert exact_sup_distance(f, f0, inst.E_box) < eta
            V_direct = sublevel_polyhedron(f).vertices()
            V_lin = linearize(f, inst.E0_box, inst.grid).polyhedron().vertices()
            assert hausdorff(V_direct, V_lin, L2, "primal") < 1e-6


def test_convex_check_examples():
    inst = ConvexInstance(F0, [1.0], 1.0, 0.5)
    r = convex_lipschitz_check(inst, 2.2, F0, F0, [1.0], 0.01)
    assert r.hypotheses_met and r.lhs == 0.0 and r.rhs == 0.0 and r.holds
    delta = 0.01
    f2 = M([[1, -1 + delta], [-1, -1 + delta]])
    r = convex_lipschitz_check(inst, 2.2, F0, f2, [1.0], delta)
    assert r.hypotheses_met and r.holds
    assert r.lhs == pytest.approx(delta)
    assert r.rhs == pytest.approx(2.2 * delta)
    # f2 = (1 + eps)|x| - 1: d_E = 2.5 eps on E = [-2.5, 2.5]
    eps = 0.01
    f2 = M([[1 + eps, -1], [-1 - eps, -1]])
    r = convex_lipschitz_check(inst, 2.2, F0, f2, [1.0], 0.025)
    assert r.hypotheses_met and r.holds
    assert r.lhs == pytest.approx(1 - 1 / 1.01)
    assert r.rhs == pytest.approx(2.2 * (3.5 * 0.01 + 0.025))


def test_convex_check_flags_hypotheses():
    inst = ConvexInstance(F0, [1.0], 1.0, 0.5)
    r = convex_lipschitz_check(inst, 1.5, F0, F0, [1.0], 0.01)
    assert not r.hypotheses_met and any("kappa" in v for v in r.violations)
    r = convex_lipschitz_check(inst, 2.2, F0, F0, [0.9], 0.01)
    assert not r.hypotheses_met and any("x1" in v for v in r.violations)
    r = convex_lipschitz_check(inst, 2.2, F0, F0, [1.0], 0.5)
    assert not r.hypotheses_met and any("admissible" in v for v in r.violations)


def test_convex_check_differentiable_flag():
    f0 = Quadratic([[1.0]], [0.0], -0.5)
    inst = ConvexInstance(f0, [1.0], 0.5, 0.5)
    delta = 1e-3
    f2 = Quadratic([[1.0]], [0.0], -0.5 + delta)
    smooth = convex_lipschitz_check(inst, 2.2, f0, f2, [1.0], delta, differentiable=True)
    plain = convex_lipschitz_check(inst, 2.2, f0, f2, [1.0], delta)
    assert smooth.hypotheses_met and smooth.holds and plain.holds
    assert smooth.lhs == pytest.approx(1 - math.sqrt(1 - 2 * delta), rel=1e-6)


def test_rho_over_box_corners():
    assert rho(BoxRegion([0.0, 0.0], [3.0, 4.0])) == pytest.approx(6.0)
