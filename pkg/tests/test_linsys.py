import math

import numpy as np
import pytest

from conftest import FIXTURES, random_feasible_system
from lipmod.errors import DimensionError, InfeasibleError, PreconditionError
from lipmod.linsys import (
    LinearSystem,
    active_set,
    c_set_distance,
    c_set_distance_full,
    dist_to_feasible,
    lipschitz_modulus,
    ssc_margin,
)
from lipmod.norms import L1, L2, LINF

S = LinearSystem.from_points


def test_system_invariants():
    sys_ = S([[1, 2, 3], [0, -1, 1]], "linf")
    assert sys_.n == 2 and sys_.spec == LINF
    assert sys_.gradient_bound == pytest.approx(3.0)  # l1 dual norm of (1, 2)
    np.testing.assert_array_equal(sys_.slacks([0, 0]), [3, 1])
    with pytest.raises(DimensionError):
        LinearSystem(3, S([[1, 2]]).U, L2)


def test_dist_to_feasible_examples():
    assert dist_to_feasible([1.0], S([[1, 0]])) == 1.0
    assert dist_to_feasible([-1.0], S([[1, 0]])) == 0.0
    assert dist_to_feasible([2, 0], S([[1, 0, 1], [0, 1, 1]])) == pytest.approx(1.0)
    with pytest.raises(InfeasibleError):
        dist_to_feasible([0.0], S([[1, -1], [-1, -1]]))


def test_active_set_examples():
    assert active_set([0], S([[1, 1], [-1, 1]])) == []
    assert active_set([1], S([[1, 1]])) == [0]
    assert active_set([0], S([[1, 0], [-1, 0]])) == [0, 1]
    with pytest.raises(PreconditionError):
        active_set([2], S([[1, 1]]))


def test_c_set_examples():
    for spec in (L1, L2, LINF):
        cs = c_set_distance(S([[1, 1]], spec), [1])
        assert cs.dist == pytest.approx(1.0) and not cs.empty
        np.testing.assert_allclose(cs.witness, [1.0])
        full = c_set_distance_full(S([[1, 1]], spec), [1])
        assert full.dist == pytest.approx(1.0, abs=1e-7)
    cs = c_set_distance(S([[1, 1], [-1, 1]]), [0])
    assert cs.empty and cs.dist == math.inf
    assert c_set_distance_full(S([[1, 1], [-1, 1]]), [0]).empty
    cs = c_set_distance(S([[1, 0], [-1, 0]]), [0])
    assert cs.zero_in and cs.dist == 0.0
    assert c_set_distance_full(S([[1, 0], [-1, 0]]), [0]).zero_in


@pytest.mark.parametrize("name", list(FIXTURES))
def test_modulus_fixtures(name):
    pts, x0, expected, cls = FIXTURES[name]
    rep = lipschitz_modulus(S(pts), x0)
    assert rep.classification == cls
    if math.isfinite(expected):
        assert abs(rep.modulus - expected) <= 1e-9
    else:
        assert rep.modulus == math.inf
    assert (cls == "zero") == rep.c_empty
    assert (cls == "infinite") == rep.zero_in_c


def test_modulus_in_polyhedral_norms():
    # x0 = (1, 0) has ||x0|| = 1 in every lp norm and one active gradient e1
    for spec in (L1, LINF):
        rep = lipschitz_modulus(S([[1, 0, 1], [0, 1, 1]], spec), [1, 0])
        assert rep.modulus == pytest.approx(2.0)
    # ||(1, 1)||_1 = 2; C is the segment [e1, e2] whose linf-norm minimum is 1/2
    rep = lipschitz_modulus(S([[1, 0, 1], [0, 1, 1]], L1), [1, 1])
    assert rep.modulus == pytest.approx((2 + 1) / 0.5)


def test_modulus_projects_slightly_infeasible_point():
    rep = lipschitz_modulus(S([[1, 1]]), [1 + 1e-7])
    assert rep.modulus == pytest.approx(2.0)
    assert rep.warnings
    with pytest.raises(PreconditionError):
        lipschitz_modulus(S([[1, 1]]), [1.1])


def test_ssc_examples():
    r = ssc_margin(S([[1, 1], [-1, 1]]), 10)
    assert r.margin == pytest.approx(1.0)
    np.testing.assert_allclose(r.point, [0.0], atol=1e-12)
    assert ssc_margin(S([[1, 0], [-1, 0]]), 10).margin == 0.0
    assert ssc_margin(S([[1, -1], [-1, -1]]), 10).margin == pytest.approx(-1.0)


def test_ssc_reports_binding_box():
    r = ssc_margin(S([[1, 1]]), 10)
    assert r.box_binding and r.margin == pytest.approx(11.0)


def test_reduction_agrees_with_full_program(rng):
    for spec in ("l1", "l2", "linf"):
        for _ in range(15):
            sys_, x0 = random_feasible_system(rng, spec=spec)
            red = c_set_distance(sys_, x0)
            full = c_set_distance_full(sys_, x0)
            assert red.empty == full.empty
            if not red.empty:
                assert red.dist == pytest.approx(full.dist, abs=1e-7)


def test_ssc_iff_zero_not_in_c(rng):
    checked = 0
    for _ in range(200):
        sys_, x0 = random_feasible_system(rng)
        ssc = ssc_margin(sys_)
        if ssc.box_binding:
            continue
        cs = c_set_distance(sys_, x0)
        if cs.empty:
            continue
        checked += 1
        assert (ssc.margin > 0) == (not cs.zero_in)
    assert checked > 50


def test_adding_rows_keeps_zero_in_c(rng):
    for _ in range(50):
        sys_, x0 = random_feasible_system(rng, active_frac=0.8)
        cs = c_set_distance(sys_, x0)
        a = rng.standard_normal(sys_.n)
        bigger = S(np.vstack([sys_.U.points, np.append(a, a @ x0 + rng.random() * (rng.random() < 0.5))]))
        if cs.zero_in:
            assert c_set_distance(bigger, x0).zero_in


def test_strong_slater_gives_finite_modulus(rng):
    seen = 0
    while seen < 50:
        sys_, _ = random_feasible_system(rng, m=int(rng.integers(1, 7)))
        ssc = ssc_margin(sys_)
        if not ssc.margin > 0 or ssc.box_binding:
            continue
        seen += 1
        for _ in range(5):
            # points between the Slater point and a boundary point of F(U)
            d = rng.standard_normal(sys_.n)
            ad = sys_.gradients @ d
            s = sys_.slacks(ssc.point)
            t = np.min(s[ad > 0] / ad[ad > 0]) if np.any(ad > 0) else 1.0
            x = ssc.point + t * rng.choice([0.3, 1.0]) * d
            assert math.isfinite(lipschitz_modulus(sys_, x).modulus)
