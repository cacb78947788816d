"""Annulus layouts for SF allocation and Poisson sampling of active devices.

Annuli are numbered 1..K from the gateway outwards and are half-open,
``[l_{i-1}, l_i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import SPREADING_FACTORS, RadioConfig, SnrThresholds, check_sf
from .propagation import exp_from_uniform, uniform_open_closed

SCHEMES = ("eib", "eab", "plb")


class PlanningError(ValueError):
    """An SF plan cannot be built from the given parameters."""


@dataclass(frozen=True)
class SfPlan:
    boundaries: tuple[float, ...]
    sfs: tuple[int, ...]
    scheme: str = "custom"

    def __post_init__(self) -> None:
        b = tuple(float(x) for x in self.boundaries)
        sfs = tuple(check_sf(int(s)) for s in self.sfs)
        if len(b) != len(sfs) + 1 or not sfs:
            raise PlanningError("need exactly one SF per annulus and K+1 boundaries")
        if b[0] != 0.0:
            raise PlanningError("innermost boundary must be 0")
        if any(not math.isfinite(x) for x in b) or any(hi <= lo for lo, hi in zip(b, b[1:])):
            raise PlanningError(f"boundaries must be finite and strictly increasing: {b}")
        object.__setattr__(self, "boundaries", b)
        object.__setattr__(self, "sfs", sfs)

    @property
    def radius(self) -> float:
        return self.boundaries[-1]

    @property
    def k(self) -> int:
        return len(self.sfs)

    def bounds(self, i: int) -> tuple[float, float]:
        """Inner and outer radius of annulus ``i`` (1-based)."""
        if not 1 <= i <= self.k:
            raise IndexError(f"annulus index {i} outside 1..{self.k}")
        return self.boundaries[i - 1], self.boundaries[i]

    def sf(self, i: int) -> int:
        self.bounds(i)
        return self.sfs[i - 1]

    def area(self, i: int) -> float:
        lo, hi = self.bounds(i)
        return math.pi * (hi * hi - lo * lo)

    @property
    def areas(self) -> np.ndarray:
        b = np.asarray(self.boundaries)
        return math.pi * np.diff(b**2)

    def annulus_of(self, d: float) -> int:
        if d < 0:
            raise ValueError(f"distance must be non-negative, got {d!r}")
        if d >= self.radius:
            raise ValueError(f"distance {d} m lies outside the cell of radius {self.radius} m")
        # bisect_right on outer boundaries gives the half-open convention
        return int(np.searchsorted(self.boundaries[1:], d, side="right")) + 1

    def scaled(self, c: float) -> SfPlan:
        return SfPlan(tuple(c * x for x in self.boundaries), self.sfs, self.scheme)


def _sfs(sfs: Sequence[int] | None) -> tuple[int, ...]:
    sfs = tuple(SPREADING_FACTORS if sfs is None else sfs)
    if not sfs:
        raise PlanningError("at least one spreading factor is required")
    return sfs


def plan_eib(radius: float, sfs: Sequence[int] | None = None) -> SfPlan:
    """Equal-width annuli, lowest SF innermost."""
    if not radius > 0:
        raise PlanningError("cell radius must be positive")
    sfs = _sfs(sfs)
    k = len(sfs)
    b = [radius * i / k for i in range(k + 1)]
    b[-1] = float(radius)
    return SfPlan(tuple(b), sfs, "eib")


def plan_eab(radius: float, sfs: Sequence[int] | None = None) -> SfPlan:
    """Equal-area annuli: l_i = R * sqrt(i / K)."""
    if not radius > 0:
        raise PlanningError("cell radius must be positive")
    sfs = _sfs(sfs)
    k = len(sfs)
    b = [radius * math.sqrt(i / k) for i in range(k + 1)]
    b[-1] = float(radius)
    return SfPlan(tuple(b), sfs, "eab")


def plb_boundary(cfg: RadioConfig, theta: float) -> float:
    """Largest distance at which the fading-free SNR still reaches ``theta`` (linear)."""
    budget = cfg.tx_power_mw * cfg.kappa / (cfg.noise_mw * theta)
    d = budget ** (1.0 / cfg.eta)
    if d < cfg.x_c:
        raise PlanningError(
            f"SNR threshold {10 * math.log10(theta):.2f} dB is not reachable even at the "
            f"critical distance {cfg.x_c} m"
        )
    return d


def plan_plb(cfg: RadioConfig, thresholds: SnrThresholds | None = None, sfs: Sequence[int] | None = None) -> SfPlan:
    """Path-loss based annuli; the cell radius is where the outermost SF stops closing the link."""
    thresholds = thresholds or SnrThresholds()
    sfs = _sfs(sfs)
    b = [0.0] + [plb_boundary(cfg, thresholds.linear(sf)) for sf in sfs]
    if any(hi <= lo for lo, hi in zip(b, b[1:])):
        raise PlanningError("PLB needs SNR thresholds strictly decreasing along the SF order")
    return SfPlan(tuple(b), sfs, "plb")


def make_plan(scheme: str, radius: float, cfg: RadioConfig, thresholds: SnrThresholds | None = None,
              sfs: Sequence[int] | None = None) -> SfPlan:
    scheme = scheme.lower()
    if scheme == "eib":
        return plan_eib(radius, sfs)
    if scheme == "eab":
        return plan_eab(radius, sfs)
    if scheme == "plb":
        return plan_plb(cfg, thresholds, sfs)
    raise PlanningError(f"unknown SF allocation scheme {scheme!r}; expected one of {SCHEMES}")


@dataclass(frozen=True)
class Deployment:
    """PPP of devices over the cell, thinned by the duty cycle."""

    plan: SfPlan
    n_bar: float
    duty_cycle: float

    def __post_init__(self) -> None:
        if not (self.n_bar >= 0 and math.isfinite(self.n_bar)):
            raise ValueError(f"mean device count must be >= 0, got {self.n_bar!r}")
        if not 0 <= self.duty_cycle <= 1:
            raise ValueError(f"duty cycle must be in [0,1], got {self.duty_cycle!r}")

    @property
    def intensity(self) -> float:
        """Device intensity lambda (devices / m^2)."""
        return self.n_bar / (math.pi * self.plan.radius**2)

    @property
    def active_intensity(self) -> float:
        return self.duty_cycle * self.intensity

    @property
    def expected(self) -> np.ndarray:
        """Expected active device count v_i of every annulus."""
        return self.active_intensity * self.plan.areas


def expected_active(dep: Deployment, i: int) -> float:
    return dep.active_intensity * dep.plan.area(i)


@dataclass(frozen=True)
class ActiveDeviceSet:
    """Active devices of one or more realisations, stored flat.

    ``owner[k]`` is the realisation that device ``k`` belongs to; annulus
    indices are 1-based.
    """

    distance: np.ndarray
    annulus: np.ndarray
    gain: np.ndarray
    owner: np.ndarray
    n_realizations: int = 1

    def __len__(self) -> int:
        return len(self.distance)


def sample_active_batch(plan: SfPlan, dep: Deployment, rng: np.random.Generator, n: int) -> ActiveDeviceSet:
    """Draw ``n`` independent realisations of the active-device process.

    For each realisation and annulus the count is Poisson(v_i); positions are
    area-uniform in the annulus and each device carries an Exp(1) gain.
    """
    v = dep.expected
    counts = rng.poisson(np.broadcast_to(v, (n, plan.k)))
    per_annulus = counts.sum(axis=0)
    total = int(per_annulus.sum())
    owner = np.repeat(np.tile(np.arange(n), plan.k), counts.T.ravel())
    annulus = np.repeat(np.arange(1, plan.k + 1), per_annulus)
    b = np.asarray(plan.boundaries)
    lo2 = (b[:-1] ** 2)[annulus - 1]
    hi2 = (b[1:] ** 2)[annulus - 1]
    u = rng.random(total)
    distance = np.sqrt(lo2 + u * (hi2 - lo2))
    # floating-point rounding must not push a point onto the next boundary
    distance = np.minimum(distance, np.nextafter(b[1:][annulus - 1], 0.0))
    gain = exp_from_uniform(uniform_open_closed(rng, total))
    return ActiveDeviceSet(distance, annulus, gain, owner, n)


def sample_active(plan: SfPlan, dep: Deployment, rng: np.random.Generator) -> ActiveDeviceSet:
    return sample_active_batch(plan, dep, rng, 1)
