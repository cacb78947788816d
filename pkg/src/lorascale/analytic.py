"""Success probabilities of an uplink packet at distance ``x1`` from the gateway.

Four conditions are covered: noise only, the strongest co-SF interferer,
the aggregate co-SF interference, and aggregate co-SF plus inter-SF
interference.  Interference from a Poisson field is handled through its
Laplace transform, which reduces every aggregate metric to
``exp(-2 pi alpha lambda * sum_j I_j)`` with ``I_j`` a one-dimensional
integral over annulus ``j``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import PathLossModel, RadioConfig
from .geometry import SfPlan
from .network import Cell
from .special import lower_incomplete_gamma, upper_incomplete_gamma


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    epsrel: float = 1e-9
    epsabs: float = 1e-12
    limit: int = 200
    z_max: float = 50.0  # truncation of integrals weighted by exp(-z)

    def __post_init__(self) -> None:
        if not (self.epsrel > 0 and self.epsabs > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.limit < 1 or not self.z_max > 0:
            raise ValueError("quadrature limit and truncation bound must be positive")


DEFAULT_QUAD = QuadratureSpec()


def _quad(f, a: float, b: float, spec: QuadratureSpec, points=None, what: str = "integral") -> float:
    if b <= a:
        return 0.0
    pts = None
    if points is not None:
        pts = [p for p in points if a < p < b] or None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info, *msg = integrate.quad(
            f, a, b, epsabs=spec.epsabs, epsrel=spec.epsrel, limit=spec.limit, points=pts, full_output=1
        )
    if not math.isfinite(val):
        raise QuadratureError(f"{what} over [{a}, {b}] is not finite ({val})")
    # QUADPACK flags (roundoff, subdivision limit) are tolerated while the error estimate stays small
    if msg and err > max(spec.epsabs, spec.epsrel * abs(val)) * 1e3:
        raise QuadratureError(
            f"{what} over [{a}, {b}] failed: value={val:.6g}, error estimate={err:.3g}, "
            f"{info.get('neval', '?')} evaluations, {info.get('last', '?')} subintervals: {msg[0]}"
        )
    return val


def _knee_points(knee: float, *extra: float) -> list[float]:
    # geometric breakpoints so a feature much narrower than the interval is never skipped
    return [knee * 2.0**k for k in range(-6, 7)] + list(extra)


@dataclass(frozen=True)
class SuccessPoint:
    x1: float
    annulus: int
    sf: int
    p_snr: float
    p_sir_dom: float
    p_sir_cosf: float
    p_sir_joint: float


# --- noise only ---------------------------------------------------------------


def snr_success(x1: float, theta: float, cfg: RadioConfig) -> float:
    """P[p_t H l(x1) >= sigma^2 theta] for H ~ Exp(1)."""
    l1 = cfg.path_loss(x1)
    return math.exp(-cfg.noise_mw * theta / (cfg.tx_power_mw * l1))


def p_snr(x1: float, cell: Cell) -> float:
    i = cell.plan.annulus_of(x1)
    return snr_success(x1, cell.theta[i - 1], cell.radio)


# --- received-power CDF of a random interferer --------------------------------


def _cdf_closed(z: float, lo: float, hi: float, model: PathLossModel) -> float:
    s = 2.0 / model.eta
    a = 1.0 + s
    mass = 0.0
    if lo < model.x_c:
        top = min(hi, model.x_c)
        mass += (top * top - lo * lo) * -math.expm1(-z / model(model.x_c))
    start = max(lo, model.x_c)
    if start < hi:
        t_hi = z / model(hi)
        t_lo = 0.0 if start == 0.0 else z / model(start)
        # x^2 (1 - e^{-z/l(x)}) bracket
        mass += hi * hi * -math.expm1(-t_hi) - start * start * -math.expm1(-t_lo)
        # (kappa/z)^{2/eta} [Gamma(1+2/eta, z/l(x))] bracket; t_lo < t_hi.
        # When both arguments are small the upper functions nearly cancel,
        # so difference the lower ones instead.
        if t_hi < a + 1.0:
            gdiff = lower_incomplete_gamma(a, t_hi) - lower_incomplete_gamma(a, t_lo)
        else:
            gdiff = upper_incomplete_gamma(a, t_lo) - upper_incomplete_gamma(a, t_hi)
        mass -= (model.kappa / z) ** s * gdiff
    return mass / (hi * hi - lo * lo)


def _cdf_quad(z: float, lo: float, hi: float, model: PathLossModel, quad: QuadratureSpec) -> float:
    def f(x: float) -> float:
        return 2.0 * x * -math.expm1(-z / model(x))

    def g(x: float) -> float:
        return 2.0 * x * math.exp(-z / model(x))

    # integrate whichever of CDF / survival is small, so relative tolerance means something
    pts = _knee_points((model.kappa / z) ** (1.0 / model.eta), model.x_c)
    area = hi * hi - lo * lo
    if z / model(lo) < 1.0:
        return _quad(f, lo, hi, quad, points=pts, what="interferer power CDF") / area
    return 1.0 - _quad(g, lo, hi, quad, points=pts, what="interferer power CDF") / area


def interferer_power_cdf(z: float, lo: float, hi: float, model: PathLossModel, method: str = "closed",
                         quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """CDF of ``G * l(D)`` with ``G ~ Exp(1)`` and ``D`` area-uniform on ``[lo, hi)``.

    ``method="closed"`` uses the incomplete-gamma closed form,
    ``method="quad"`` integrates the distance density directly.
    """
    if z < 0 or math.isnan(z):
        raise ValueError(f"power level must be non-negative, got {z!r}")
    if not 0 <= lo < hi:
        raise ValueError(f"invalid annulus bounds [{lo}, {hi})")
    if z == 0.0:
        return 0.0
    if math.isinf(z):
        return 1.0
    if method == "closed":
        val = _cdf_closed(z, lo, hi, model)
    elif method == "quad":
        val = _cdf_quad(z, lo, hi, model, quad)
    else:
        raise ValueError(f"unknown method {method!r}")
    return min(1.0, max(0.0, val))


# --- dominant co-SF interferer ------------------------------------------------


def dominant_success(x1: float, lo: float, hi: float, delta: float, v: float, model: PathLossModel,
                     quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """P[H l(x1) >= delta * max_k G_k l(x_k)] with Poisson(v) interferers on ``[lo, hi)``.

    Evaluates ``e^{-v} int_0^inf exp(v F(z l(x1) / delta)) e^{-z} dz`` as one
    minus ``int (1 - exp(-v (1 - F))) e^{-z} dz``.
    """
    if v < 0:
        raise ValueError("expected interferer count must be non-negative")
    if v == 0.0 or delta == 0.0:
        return 1.0
    l1 = model(x1)
    if math.isinf(l1):
        return 1.0
    scale = l1 / delta

    def outage(z: float) -> float:
        miss = 1.0 - _cdf_closed(z * scale, lo, hi, model) if z > 0 else 1.0
        return -math.expm1(-v * miss) * math.exp(-z)

    # integrate the outage part: it is the small quantity when success is near 1
    # (dropping the tail beyond z_max costs < e^-z_max)
    # 1 - F(z * scale) switches from ~1 to a power-law tail around z = l(hi) / scale
    z0 = model(hi) / scale
    pts = [z0 * 4.0**k for k in range(-2, 40) if z0 * 4.0**k < quad.z_max]
    val = 1.0 - _quad(outage, 0.0, quad.z_max, quad, points=pts, what="dominant-interferer outage")
    return min(1.0, max(0.0, val))


def p_sir_dominant(x1: float, cell: Cell, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    i = cell.plan.annulus_of(x1)
    lo, hi = cell.plan.bounds(i)
    v = cell.deployment.expected[i - 1]
    return dominant_success(x1, lo, hi, cell.delta[i - 1, i - 1], v, cell.radio.path_loss, quad)


# --- aggregate interference ---------------------------------------------------


def interference_integral(x1: float, delta: float, lo: float, hi: float, model: PathLossModel,
                          quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``int_lo^hi delta l(x) / (l(x1) + delta l(x)) x dx`` in m^2."""
    if not 0 <= lo < hi:
        raise ValueError(f"invalid annulus bounds [{lo}, {hi})")
    if delta < 0:
        raise ValueError("SIR threshold must be non-negative")
    if delta == 0.0:
        return 0.0
    if math.isinf(delta):
        return 0.5 * (hi * hi - lo * lo)
    l1 = model(x1)
    if math.isinf(l1):
        return 0.0
    total = 0.0
    xc = model.x_c
    if lo < xc:
        # inside the critical distance the path gain is flat
        lc = model(xc)
        top = min(hi, xc)
        total += delta * lc / (l1 + delta * lc) * 0.5 * (top * top - lo * lo)
    start = max(lo, xc)
    if start < hi:
        r1 = max(x1, xc)
        eta = model.eta

        def f(x: float) -> float:
            return delta * x / ((x / r1) ** eta + delta)

        knee = r1 * delta ** (1.0 / eta)
        total += _quad(f, start, hi, quad, points=_knee_points(knee), what="interference integral")
    return total


def interference_terms(x1: float, cell: Cell, quad: QuadratureSpec = DEFAULT_QUAD) -> np.ndarray:
    """``I(x1, delta_ij, annulus j)`` for every annulus ``j`` (0-based array)."""
    i = cell.plan.annulus_of(x1)
    model = cell.radio.path_loss
    row = cell.delta[i - 1]
    return np.array([
        interference_integral(x1, row[j], *cell.plan.bounds(j + 1), model, quad) for j in range(cell.plan.k)
    ])


def _laplace(cell: Cell, integral: float) -> float:
    return math.exp(-2.0 * math.pi * cell.deployment.active_intensity * integral)


def p_sir_cosf(x1: float, cell: Cell, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    i = cell.plan.annulus_of(x1)
    lo, hi = cell.plan.bounds(i)
    d = cell.delta[i - 1, i - 1]
    return _laplace(cell, interference_integral(x1, d, lo, hi, cell.radio.path_loss, quad))


def p_sir_intersf(x1: float, cell: Cell, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    i = cell.plan.annulus_of(x1)
    terms = interference_terms(x1, cell, quad)
    return _laplace(cell, float(terms.sum() - terms[i - 1]))


def p_sir_joint(x1: float, cell: Cell, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    return _laplace(cell, float(interference_terms(x1, cell, quad).sum()))


def success_point(x1: float, cell: Cell, quad: QuadratureSpec = DEFAULT_QUAD) -> SuccessPoint:
    i = cell.plan.annulus_of(x1)
    terms = interference_terms(x1, cell, quad)
    cosf = _laplace(cell, float(terms[i - 1]))
    joint = _laplace(cell, float(terms.sum()))
    return SuccessPoint(
        x1=float(x1),
        annulus=i,
        sf=cell.plan.sf(i),
        p_snr=p_snr(x1, cell),
        p_sir_dom=p_sir_dominant(x1, cell, quad),
        p_sir_cosf=cosf,
        p_sir_joint=joint,
    )


def sweep_distances(plan: SfPlan, n_points: int) -> np.ndarray:
    """Distance grid over (0, R) that respects annulus boundaries.

    Points are shared out across annuli in proportion to width (at least one
    each) and spaced evenly from the inner boundary of each annulus to just
    inside its outer boundary, so both sides of every SF switch are sampled.
    """
    k = plan.k
    if n_points < k:
        raise ValueError(f"need at least one point per annulus ({k}), got {n_points}")
    widths = np.diff(plan.boundaries)
    share = widths / widths.sum() * (n_points - k)
    counts = np.floor(share).astype(int) + 1
    short = n_points - counts.sum()
    order = np.argsort(-(share - np.floor(share)), kind="stable")
    counts[order[:short]] += 1
    out = []
    for i in range(k):
        lo, hi = plan.boundaries[i], plan.boundaries[i + 1]
        eps = min(1.0, 1e-3 * (hi - lo))
        start = eps if i == 0 else lo
        out.append(np.linspace(start, hi - eps, counts[i]) if counts[i] > 1 else np.array([start]))
    return np.concatenate(out)


def success_sweep(cell: Cell, n_points: int = 200, quad: QuadratureSpec = DEFAULT_QUAD) -> list[SuccessPoint]:
    return [success_point(float(x), cell, quad) for x in sweep_distances(cell.plan, n_points)]
