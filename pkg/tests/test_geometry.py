import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from lorascale import Deployment, RadioConfig, SfPlan, SnrThresholds, make_plan, plan_eab, plan_eib, plan_plb
from lorascale.geometry import PlanningError, expected_active, plb_boundary, sample_active, sample_active_batch


def test_eib_boundaries():
    p = plan_eib(6000.0)
    assert p.boundaries == (0.0, 1000.0, 2000.0, 3000.0, 4000.0, 5000.0, 6000.0)
    assert p.sfs == (7, 8, 9, 10, 11, 12)
    assert p.k == 6 and p.radius == 6000.0


def test_eab_equal_areas():
    p = plan_eab(6000.0)
    np.testing.assert_allclose(p.areas, math.pi * 6000.0**2 / 6, rtol=1e-12)
    assert p.boundaries[-1] == 6000.0


def test_plb_radius():
    p = plan_plb(RadioConfig())
    assert p.radius == pytest.approx(9860.0, rel=0.005)
    # each boundary is where the fading-free SNR equals that SF's threshold
    cfg = RadioConfig()
    for i in range(1, 7):
        d = p.bounds(i)[1]
        snr = cfg.tx_power_mw * cfg.path_loss(d) / cfg.noise_mw
        assert snr == pytest.approx(SnrThresholds().linear(p.sf(i)), rel=1e-10)


def test_plb_first_boundary():
    assert plb_boundary(RadioConfig(), 10**-0.6) == pytest.approx(3364.0, rel=1e-3)


def test_plb_requires_decreasing_thresholds():
    bad = SnrThresholds({7: -20, 8: -9, 9: -12, 10: -15, 11: -17.5, 12: -6})
    with pytest.raises(PlanningError):
        plan_plb(RadioConfig(), bad)


def test_plb_unreachable_threshold():
    with pytest.raises(PlanningError):
        plb_boundary(RadioConfig(x_c=1e6), 1.0)


def test_make_plan_dispatch():
    cfg = RadioConfig()
    assert make_plan("EIB", 6000.0, cfg).scheme == "eib"
    assert make_plan("eab", 6000.0, cfg).scheme == "eab"
    assert make_plan("plb", 1.0, cfg).radius == pytest.approx(plan_plb(cfg).radius)
    with pytest.raises(PlanningError):
        make_plan("xyz", 6000.0, cfg)


@pytest.mark.parametrize(
    "b, sfs",
    [((1.0, 2.0), (7,)), ((0.0, 2.0, 1.0), (7, 8)), ((0.0, 1.0), (7, 8)), ((0.0, 1.0), (6,)), ((0.0, math.inf), (7,))],
)
def test_invalid_plans(b, sfs):
    with pytest.raises(ValueError):
        SfPlan(b, sfs)


def test_annulus_half_open():
    p = plan_eib(6000.0)
    assert p.annulus_of(0.0) == 1
    assert p.annulus_of(999.999) == 1
    assert p.annulus_of(1000.0) == 2
    assert p.annulus_of(5999.9) == 6
    with pytest.raises(ValueError):
        p.annulus_of(6000.0)
    with pytest.raises(ValueError):
        p.annulus_of(-1.0)
    with pytest.raises(IndexError):
        p.bounds(0)
    with pytest.raises(IndexError):
        p.bounds(7)


@given(st.floats(min_value=10, max_value=1e5), st.sampled_from(["eib", "eab"]), st.floats(0, 1, exclude_max=True))
def test_annulus_lookup_consistent_with_bounds(radius, scheme, frac):
    p = make_plan(scheme, radius, RadioConfig())
    d = frac * radius
    i = p.annulus_of(d)
    lo, hi = p.bounds(i)
    assert lo <= d < hi


@given(st.floats(min_value=10, max_value=1e5))
def test_areas_sum_to_disk(radius):
    for p in (plan_eib(radius), plan_eab(radius)):
        assert p.areas.sum() == pytest.approx(math.pi * radius**2, rel=1e-12)
        assert all(b > a for a, b in zip(p.boundaries, p.boundaries[1:]))


def test_deployment_expected_counts():
    dep = Deployment(plan_eib(6000.0), 1500.0, 0.0033)
    assert dep.expected.sum() == pytest.approx(1500 * 0.0033, rel=1e-12)
    # EIB areas grow as 2i - 1
    np.testing.assert_allclose(dep.expected, 4.95 * np.arange(1, 12, 2) / 36, rtol=1e-12)
    assert expected_active(dep, 3) == pytest.approx(dep.expected[2])
    with pytest.raises(ValueError):
        Deployment(plan_eib(1.0), -1.0, 0.1)
    with pytest.raises(ValueError):
        Deployment(plan_eib(1.0), 1.0, 1.5)


def test_sampler_counts_and_radial_law():
    plan = plan_eib(6000.0)
    dep = Deployment(plan, 1500.0, 0.02)  # 30 active devices per realisation on average
    s = sample_active_batch(plan, dep, np.random.default_rng(11), 20_000)
    counts = np.zeros((20_000, 6))
    np.add.at(counts, (s.owner, s.annulus - 1), 1)
    np.testing.assert_allclose(counts.mean(axis=0), dep.expected, rtol=0.03)
    np.testing.assert_allclose(counts.var(axis=0), dep.expected, rtol=0.06)
    lo = np.asarray(plan.boundaries)[s.annulus - 1]
    hi = np.asarray(plan.boundaries)[s.annulus]
    assert np.all(s.distance >= lo) and np.all(s.distance < hi)
    # area-uniform: (d^2 - lo^2) / (hi^2 - lo^2) ~ U(0, 1)
    u = (s.distance**2 - lo**2) / (hi**2 - lo**2)
    assert stats.kstest(u, "uniform").pvalue > 1e-3
    assert stats.kstest(s.gain, "expon").pvalue > 1e-3


def test_sample_active_single_realisation():
    plan = plan_eib(6000.0)
    s = sample_active(plan, Deployment(plan, 1500.0, 0.0033), np.random.default_rng(0))
    assert s.n_realizations == 1
    assert np.all(s.owner == 0)


def test_sampler_empty_when_no_devices():
    plan = plan_eib(6000.0)
    s = sample_active_batch(plan, Deployment(plan, 0.0, 0.5), np.random.default_rng(0), 100)
    assert len(s) == 0
