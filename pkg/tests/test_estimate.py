import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lipmod.config import SweepConfig
from lipmod.errors import PreconditionError
from lipmod.estimate import CSV_COLUMNS, adversarial_pairs, empirical_lip, perturb_cloud
from lipmod.hulls import PointCloud, hausdorff
from lipmod.linsys import LinearSystem, lipschitz_modulus
from lipmod.norms import L1, L2, LINF

from conftest import FIXTURES, random_feasible_system


def fixture(name, spec=L2):
    U, x0, lip, _ = FIXTURES[name]
    return LinearSystem.from_points(U, spec), np.array(x0), lip


@pytest.mark.parametrize("spec", [L1, L2, LINF])
@pytest.mark.parametrize("kinds", [("jitter",), ("add_point",), ("drop_point",),
                                   ("jitter", "add_point", "drop_point")])
def test_perturb_cloud_stays_in_ball(spec, kinds, rng):
    U0 = PointCloud(rng.standard_normal((6, 3)))
    for delta in (1.0, 1e-3):
        for _ in range(20):
            U = perturb_cloud(U0, delta, rng, kinds, spec)
            assert hausdorff(U, U0, spec, "coeff") <= delta * (1 + 1e-12)


def test_perturb_cloud_zero_radius_and_validation(rng):
    U0 = PointCloud([[1.0, 2.0]])
    assert perturb_cloud(U0, 0.0, rng) is U0
    with pytest.raises(ValueError):
        perturb_cloud(U0, -1.0, rng)


@given(st.integers(0, 2**32 - 1), st.floats(1e-6, 10.0))
@settings(max_examples=50, deadline=None)
def test_perturb_cloud_property(seed, delta):
    rng = np.random.default_rng(seed)
    U0 = PointCloud(rng.standard_normal((4, 2)))
    U = perturb_cloud(U0, delta, rng, ("jitter", "add_point", "drop_point"))
    assert hausdorff(U, U0, L2, "coeff") <= delta * (1 + 1e-12)


@pytest.mark.parametrize("delta", [0.1, 0.01, 0.001])
def test_adversarial_ratio_on_single_inequality(delta):
    sys0, x0, _ = fixture("single")
    (U0, U2), = list(adversarial_pairs(sys0, x0, delta))
    assert hausdorff(U0, U2, L2, "coeff") == pytest.approx(delta)
    # x <= 1 tilted to (1 + d) x <= 1 - d at x0 = 1
    r = empirical_lip(sys0, x0, SweepConfig(deltas=(delta,), samples_per_delta=1))
    assert r.rows[0].adversarial_ratio == pytest.approx(2 / (1 + delta), rel=1e-9)


def test_estimate_converges_on_single_inequality():
    sys0, x0, lip = fixture("single")
    r = empirical_lip(sys0, x0, SweepConfig(samples_per_delta=500, seed=42))
    assert abs(r.estimate - lip) <= 0.01 * lip
    assert [d for d, _ in r.per_delta] == [0.1, 0.01, 0.001]


def test_zero_modulus_fixture_estimates_zero():
    sys0, x0, lip = fixture("slater")
    r = empirical_lip(sys0, x0, SweepConfig(samples_per_delta=300, seed=1))
    assert lip == 0.0 and r.estimate == 0.0 and not r.diverging


def test_infinite_modulus_fixture_diverges():
    sys0, x0, lip = fixture("ssc_fail")
    r = empirical_lip(sys0, x0, SweepConfig(samples_per_delta=200, seed=3))
    assert math.isinf(lip) and r.diverging
    assert r.to_dict()["diverging"] is True


def test_lower_bound_soundness_on_random_systems(rng):
    checked = 0
    while checked < 15:
        sys0, x0 = random_feasible_system(rng, n=int(rng.integers(1, 4)), m=int(rng.integers(1, 6)))
        lip = lipschitz_modulus(sys0, x0).modulus
        if not math.isfinite(lip):
            continue
        checked += 1
        r = empirical_lip(sys0, x0, SweepConfig(samples_per_delta=200, seed=checked))
        assert r.estimate <= 1.05 * lip + 1e-9


def test_calm_never_exceeds_lip_and_matches_calm_mode():
    for name in ("single", "planar"):
        sys0, x0, _ = fixture(name)
        cfg = SweepConfig(samples_per_delta=200, seed=7)
        lip = empirical_lip(sys0, x0, cfg)
        calm = empirical_lip(sys0, x0, SweepConfig(samples_per_delta=200, seed=7, mode="calm"))
        for row in lip.rows:
            assert row.calm_ratio <= row.max_ratio
        assert [r.max_ratio for r in calm.rows] == [r.calm_ratio for r in lip.rows]
        assert calm.estimate == lip.calm_estimate


def test_mixed_kinds_are_deterministic_across_thread_counts(monkeypatch):
    sys0, x0, _ = fixture("planar")
    monkeypatch.delenv("LIPMOD_THREADS", raising=False)
    kinds = ("jitter", "add_point", "drop_point")
    runs = [
        empirical_lip(sys0, x0, SweepConfig(samples_per_delta=300, seed=5,
                                            perturbation_kinds=kinds, threads=t)).to_dict()
        for t in (1, 4)
    ]
    monkeypatch.setenv("LIPMOD_THREADS", "2")
    runs.append(empirical_lip(sys0, x0, SweepConfig(samples_per_delta=300, seed=5,
                                                    perturbation_kinds=kinds, threads=8)).to_dict())
    assert runs[0] == runs[1] == runs[2]


def test_same_seed_same_result_and_seed_matters():
    sys0, x0, _ = fixture("planar")
    a = empirical_lip(sys0, x0, SweepConfig(samples_per_delta=100, seed=11, deltas=(0.1,)))
    b = empirical_lip(sys0, x0, SweepConfig(samples_per_delta=100, seed=11, deltas=(0.1,)))
    c = empirical_lip(sys0, x0, SweepConfig(samples_per_delta=100, seed=12, deltas=(0.1,)))
    assert a.to_dict() == b.to_dict()
    assert a.rows[0].calm_ratio != c.rows[0].calm_ratio


def test_csv_layout():
    sys0, x0, _ = fixture("single")
    r = empirical_lip(sys0, x0, SweepConfig(samples_per_delta=50, seed=2))
    rows = list(csv.reader(io.StringIO(r.to_csv())))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 1 + len(r.rows)
    for line, row in zip(rows[1:], r.rows):
        assert float(line[0]) == row.delta and float(line[1]) == row.max_ratio
        assert int(line[2]) + int(line[3]) == 50


def test_samples_are_accounted_for():
    sys0, x0, _ = fixture("planar")
    r = empirical_lip(sys0, x0, SweepConfig(samples_per_delta=100, seed=9,
                                            perturbation_kinds=("add_point",)))
    for row in r.rows:
        assert row.samples_used + row.discarded == 100


def test_rejects_infeasible_x0():
    sys0, _, _ = fixture("single")
    with pytest.raises(PreconditionError):
        empirical_lip(sys0, [5.0], SweepConfig(samples_per_delta=1))
