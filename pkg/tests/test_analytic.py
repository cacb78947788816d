import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from lorascale import Cell, PathLossModel, RadioConfig, plan_eab, plan_eib, plan_plb
from lorascale import analytic as an
from lorascale.geometry import plb_boundary

# dominant co-SF interferer success, EIB 6 km, N = 1500, default radio;
# evaluated independently with mpmath (50 digits, direct CDF integral over distance)
DOMINANT_ORACLE = {500.0: 0.94677231632272, 3000.0: 0.680232319980021, 5500.0: 0.470396685685985}


def riemann_interference(x1, delta, lo, hi, model, n=1_000_000):
    h = (hi - lo) / n
    x = lo + h * (np.arange(n) + 0.5)
    g = model.gain(x)
    return float(np.sum(delta * g / (model(x1) + delta * g) * x) * h)


@pytest.mark.parametrize("x1", sorted(DOMINANT_ORACLE))
def test_dominant_against_oracle(cell6, x1):
    assert an.p_sir_dominant(x1, cell6) == pytest.approx(DOMINANT_ORACLE[x1], abs=1e-9)


def test_snr_success_formula(cell6):
    cfg = cell6.radio
    for x1 in (10.0, 2500.0, 5999.0):
        i = cell6.plan.annulus_of(x1)
        theta = 10 ** ([-6, -9, -12, -15, -17.5, -20][i - 1] / 10)
        expect = math.exp(-cfg.noise_mw * theta / (cfg.tx_power_mw * cfg.kappa * x1**-3))
        assert an.p_snr(x1, cell6) == pytest.approx(expect, rel=1e-13)


def test_snr_success_reference_values():
    cfg = RadioConfig()
    # SF7 at 1 km: mean SNR 9.573 against a -6 dB threshold
    assert an.snr_success(1000.0, 10**-0.6, cfg) == pytest.approx(math.exp(-0.2512 / 9.573), abs=5e-4)
    assert an.snr_success(1000.0, 10**-0.6, cfg) == pytest.approx(0.974, abs=5e-4)
    # at a PLB boundary the mean SNR equals the threshold
    for theta in (10**-0.6, 10**-1.2, 0.01):
        assert an.snr_success(plb_boundary(cfg, theta), theta, cfg) == pytest.approx(math.exp(-1), rel=1e-12)
    assert an.snr_success(1000.0, 10**-0.6, RadioConfig(noise_density_dbm_hz=-1000.0)) == 1.0


def test_snr_success_within_critical_distance_is_flat(cell6):
    assert an.p_snr(0.0, cell6) == an.p_snr(0.5, cell6) == an.p_snr(1.0, cell6)


def test_cosf_against_direct_quadrature(cell6):
    # independent evaluation of exp(-2 pi lambda alpha int delta l(x) / (l(x1) + delta l(x)) x dx)
    x1 = 3000.0
    m = cell6.radio.path_loss
    d = cell6.delta[3, 3]
    ref, _ = integrate.quad(lambda x: d * m(x) / (m(x1) + d * m(x)) * x, 3000.0, 4000.0, epsrel=1e-12)
    lam = 1500 * 0.0033 / (math.pi * 6000.0**2)
    assert an.p_sir_cosf(x1, cell6) == pytest.approx(math.exp(-2 * math.pi * lam * ref), rel=1e-10)


@pytest.mark.parametrize("lo, hi", [(0.0, 1000.0), (0.3, 2.0), (1000.0, 2000.0), (5000.0, 6000.0)])
def test_cdf_closed_vs_quad(lo, hi):
    m = RadioConfig().path_loss
    for z in np.logspace(math.log10(m(hi)) - 4, math.log10(m(0.0)) + 3, 60):
        a = an.interferer_power_cdf(z, lo, hi, m, "closed")
        b = an.interferer_power_cdf(z, lo, hi, m, "quad")
        assert abs(a - b) <= 1e-10


def test_cdf_is_a_distribution():
    m = RadioConfig().path_loss
    zs = np.logspace(-20, 0, 200)
    f = [an.interferer_power_cdf(z, 1000.0, 2000.0, m) for z in zs]
    assert all(0.0 <= v <= 1.0 for v in f)
    assert all(b >= a for a, b in zip(f, f[1:]))
    assert an.interferer_power_cdf(0.0, 1000.0, 2000.0, m) == 0.0
    assert an.interferer_power_cdf(math.inf, 1000.0, 2000.0, m) == 1.0
    assert f[-1] == pytest.approx(1.0, abs=1e-12)


def test_cdf_rejects_bad_input():
    m = RadioConfig().path_loss
    with pytest.raises(ValueError):
        an.interferer_power_cdf(-1.0, 0.0, 1.0, m)
    with pytest.raises(ValueError):
        an.interferer_power_cdf(1.0, 2.0, 1.0, m)
    with pytest.raises(ValueError):
        an.interferer_power_cdf(1.0, 0.0, 1.0, m, method="mc")


@pytest.mark.parametrize(
    "x1, delta, lo, hi, xc",
    [(3000.0, 1.26, 3000.0, 4000.0, 1.0), (0.5, 1.26, 0.0, 1000.0, 1.0), (500.0, 0.01, 4000.0, 6000.0, 1.0),
     (5.0, 3.0, 0.0, 50.0, 10.0), (200.0, 0.5, 0.0, 300.0, 0.0)],
)
def test_interference_integral_vs_riemann(x1, delta, lo, hi, xc):
    m = PathLossModel(RadioConfig().kappa, 3.0, xc)
    ref = riemann_interference(x1, delta, lo, hi, m)
    assert an.interference_integral(x1, delta, lo, hi, m) == pytest.approx(ref, rel=1e-7)


def test_interference_integral_limits():
    m = RadioConfig().path_loss
    assert an.interference_integral(10.0, 0.0, 0.0, 100.0, m) == 0.0
    assert an.interference_integral(10.0, math.inf, 0.0, 100.0, m) == pytest.approx(5000.0)
    with pytest.raises(ValueError):
        an.interference_integral(10.0, -1.0, 0.0, 100.0, m)


@settings(max_examples=40, deadline=None)
@given(st.floats(1.0, 5999.0), st.sampled_from(["eib", "eab"]))
def test_bound_chain(x1, scheme):
    plan = plan_eib(6000.0) if scheme == "eib" else plan_eab(6000.0)
    p = an.success_point(x1, Cell(RadioConfig(), plan, 1500.0))
    assert 0.0 <= p.p_sir_joint <= p.p_sir_cosf <= p.p_sir_dom <= 1.0
    assert 0.0 <= p.p_snr <= 1.0


@settings(max_examples=30, deadline=None)
@given(st.floats(1.0, 5999.0), st.floats(100.0, 3000.0), st.floats(100.0, 3000.0))
def test_success_non_increasing_in_devices(x1, n_a, n_b):
    lo, hi = sorted((n_a, n_b))
    a = an.success_point(x1, Cell(RadioConfig(), plan_eib(6000.0), lo))
    b = an.success_point(x1, Cell(RadioConfig(), plan_eib(6000.0), hi))
    assert b.p_sir_cosf <= a.p_sir_cosf
    assert b.p_sir_joint <= a.p_sir_joint
    assert b.p_sir_dom <= a.p_sir_dom + 1e-12


def test_no_devices_means_no_interference():
    p = an.success_point(2500.0, Cell(RadioConfig(), plan_eib(6000.0), 0.0))
    assert p.p_sir_dom == p.p_sir_cosf == p.p_sir_joint == 1.0


def test_intersf_factorisation(cell6):
    x1 = 4500.0
    assert an.p_sir_joint(x1, cell6) == pytest.approx(
        an.p_sir_cosf(x1, cell6) * an.p_sir_intersf(x1, cell6), rel=1e-12)


def test_sawtooth(cell6):
    for lo, hi in zip(cell6.plan.boundaries[1:-1], cell6.plan.boundaries[2:]):
        assert an.p_snr(lo + 1.0, cell6) > an.p_snr(lo - 1.0, cell6)


def test_scale_invariance_pointwise():
    cfg = RadioConfig(x_c=0.0)
    a = Cell(cfg, plan_eib(6000.0), 1500.0)
    b = Cell(cfg, plan_eib(12000.0), 1500.0)
    for x1 in (700.0, 3100.0, 5900.0):
        pa, pb = an.success_point(x1, a), an.success_point(2 * x1, b)
        assert pb.p_sir_cosf == pytest.approx(pa.p_sir_cosf, abs=1e-10)
        assert pb.p_sir_joint == pytest.approx(pa.p_sir_joint, abs=1e-10)
        assert pb.p_sir_dom == pytest.approx(pa.p_sir_dom, abs=1e-8)
        assert pb.p_snr < pa.p_snr


def test_sweep_distances_layout():
    plan = plan_eib(6000.0)
    xs = an.sweep_distances(plan, 200)
    assert len(xs) == 200
    assert np.all(np.diff(xs) > 0)
    assert xs[0] > 0 and xs[-1] < 6000.0
    counts = np.bincount([plan.annulus_of(x) for x in xs], minlength=7)[1:]
    assert counts.min() >= 33 and counts.sum() == 200
    # both sides of each interior boundary are sampled
    for b in plan.boundaries[1:-1]:
        assert b in xs
    with pytest.raises(ValueError):
        an.sweep_distances(plan, 5)


def test_sweep_distances_plb_uneven_widths():
    plan = plan_plb(RadioConfig())
    xs = an.sweep_distances(plan, 30)
    assert len(xs) == 30
    assert {plan.annulus_of(x) for x in xs} == set(range(1, 7))


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        an.QuadratureSpec(epsrel=0.0, epsabs=0.0)
