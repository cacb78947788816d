"""Coverage probability: success probability averaged over a device placed uniformly in the cell."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import analytic
from .analytic import DEFAULT_QUAD, QuadratureSpec, _quad
from .core import DEFAULT_SIR, RadioConfig, SirMatrix, SnrThresholds
from .geometry import SfPlan, make_plan
from .network import Cell

# (duty cycle, transmit power dBm) of the EU868 sub-bands
PRESETS: dict[str, tuple[float, float]] = {
    "h1.4": (0.0033, 14.0),
    "h1.5": (0.0005, 14.0),
    "h1.6": (0.10, 27.0),
}


def apply_preset(cfg: RadioConfig, name: str) -> RadioConfig:
    try:
        alpha, pt = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}") from None
    return RadioConfig(
        tx_power_dbm=pt,
        bandwidth_hz=cfg.bandwidth_hz,
        carrier_hz=cfg.carrier_hz,
        noise_density_dbm_hz=cfg.noise_density_dbm_hz,
        noise_figure_db=cfg.noise_figure_db,
        eta=cfg.eta,
        x_c=cfg.x_c,
        duty_cycle=alpha,
    )


@dataclass(frozen=True)
class CoverageResult:
    n_bar: float
    pc_snr: float
    pc_sir_dom: float
    pc_sir_cosf: float
    pc_sir_joint: float
    pc_joint: float


@dataclass(frozen=True)
class ContourGrid:
    radii: tuple[float, ...]
    device_counts: tuple[float, ...]
    values: np.ndarray  # pc_joint, shape (len(radii), len(device_counts))

    def rows(self) -> Iterable[tuple[float, float, float]]:
        for a, r in enumerate(self.radii):
            for b, n in enumerate(self.device_counts):
                yield r, n, float(self.values[a, b])


def coverage(metric: Callable[[float], float], plan: SfPlan, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``2/R^2 * sum_i int_{l_{i-1}}^{l_i} metric(x) x dx``.

    Integrated annulus by annulus because metrics jump at every boundary.
    """
    total = 0.0
    for i in range(1, plan.k + 1):
        lo, hi = plan.bounds(i)
        total += _quad(lambda x: metric(x) * x, lo, hi, quad, what=f"coverage over annulus {i}")
    return 2.0 * total / plan.radius**2


class _Terms:
    """Memoised interference integrals; they depend on geometry only, not on N."""

    def __init__(self, cell: Cell, quad: QuadratureSpec):
        self.cell = cell
        self.quad = quad
        self._memo: dict[float, tuple[int, float, float]] = {}

    def __call__(self, x1: float) -> tuple[int, float, float]:
        hit = self._memo.get(x1)
        if hit is None:
            i = self.cell.plan.annulus_of(x1)
            t = analytic.interference_terms(x1, self.cell, self.quad)
            hit = self._memo[x1] = (i, float(t[i - 1]), float(t.sum()))
        return hit


def _sir_coverages(cell: Cell, terms: _Terms, quad: QuadratureSpec, dominant: bool) -> tuple[float, float, float, float]:
    c = 2.0 * math.pi * cell.deployment.active_intensity

    def cosf(x: float) -> float:
        return math.exp(-c * terms(x)[1])

    def joint(x: float) -> float:
        return math.exp(-c * terms(x)[2])

    def both(x: float) -> float:
        return analytic.p_snr(x, cell) * joint(x)

    pc_dom = coverage(lambda x: analytic.p_sir_dominant(x, cell, quad), cell.plan, quad) if dominant else math.nan
    return pc_dom, coverage(cosf, cell.plan, quad), coverage(joint, cell.plan, quad), coverage(both, cell.plan, quad)


def coverage_point(cell: Cell, quad: QuadratureSpec = DEFAULT_QUAD, dominant: bool = True) -> CoverageResult:
    return coverage_sweep(cell, [cell.n_bar], quad, dominant)[0]


def coverage_sweep(cell: Cell, n_bar_list: Sequence[float], quad: QuadratureSpec = DEFAULT_QUAD,
                   dominant: bool = True) -> list[CoverageResult]:
    """Coverage of every metric for each mean device count in ``n_bar_list``.

    ``cell.n_bar`` is ignored; the noise-only coverage is computed once.
    """
    if len(n_bar_list) == 0:
        raise ValueError("need at least one device count")
    if any(not (n >= 0) for n in n_bar_list):
        raise ValueError("device counts must be non-negative")
    pc_snr = coverage(lambda x: analytic.p_snr(x, cell), cell.plan, quad)
    terms = _Terms(cell, quad)
    out = []
    for n in n_bar_list:
        c = cell.with_devices(float(n))
        dom, cosf, joint, both = _sir_coverages(c, terms, quad, dominant)
        out.append(CoverageResult(float(n), pc_snr, dom, cosf, joint, both))
    return out


def _contour_row(cfg: RadioConfig, sir: SirMatrix, snr: SnrThresholds, scheme: str, radius: float,
                 device_counts: Sequence[float], sfs, quad: QuadratureSpec) -> list[float]:
    plan = make_plan(scheme, radius, cfg, snr, sfs)
    cell = Cell(cfg, plan, 0.0, sir, snr)
    return [r.pc_joint for r in coverage_sweep(cell, device_counts, quad, dominant=False)]


def contour_grid(cfg: RadioConfig, radii: Sequence[float], device_counts: Sequence[float], scheme: str = "eib",
                 sir: SirMatrix = DEFAULT_SIR, snr: SnrThresholds | None = None, sfs=None,
                 quad: QuadratureSpec = DEFAULT_QUAD, workers: int = 1) -> ContourGrid:
    """Joint coverage ``Pc[P_SNR * P_SIR^Pi]`` over a (radius, mean device count) grid.

    Annuli are re-planned for every radius.  Rows are independent, so they
    can be evaluated concurrently; assembly order is fixed.
    """
    if len(radii) == 0 or len(device_counts) == 0:
        raise ValueError("contour grid axes must be non-empty")
    if scheme.lower() == "plb":
        raise ValueError("the PLB scheme fixes the cell radius; it cannot be swept over radii")
    snr = snr or SnrThresholds()

    def row(r: float) -> list[float]:
        return _contour_row(cfg, sir, snr, scheme, float(r), device_counts, sfs, quad)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(row, radii))
    else:
        rows = [row(r) for r in radii]
    return ContourGrid(tuple(float(r) for r in radii), tuple(float(n) for n in device_counts), np.array(rows))


def default_contour_axes() -> tuple[np.ndarray, np.ndarray]:
    return np.linspace(1000.0, 15000.0, 15), np.linspace(100.0, 4000.0, 20)
