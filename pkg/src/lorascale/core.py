"""Unit conversions, radio configuration and the LoRa threshold tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s

SPREADING_FACTORS: tuple[int, ...] = (7, 8, 9, 10, 11, 12)

# Demodulator SNR floor per SF (dB), SX1272/76 datasheet values.
DEFAULT_SNR_THRESHOLDS_DB: dict[int, float] = {
    7: -6.0,
    8: -9.0,
    9: -12.0,
    10: -15.0,
    11: -17.5,
    12: -20.0,
}

# Capture thresholds (dB): row = desired SF, column = interfering SF, SF7..SF12.
DEFAULT_SIR_MATRIX_DB: tuple[tuple[float, ...], ...] = (
    (1, -8, -9, -9, -9, -9),
    (-11, 1, -11, -12, -13, -13),
    (-15, -13, 1, -13, -14, -15),
    (-19, -18, -17, 1, -17, -18),
    (-22, -22, -21, -20, 1, -20),
    (-25, -25, -25, -24, -23, 1),
)


def _finite(x: float, what: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"{what} must be finite, got {x!r}")
    return x


def db_to_linear(x: float) -> float:
    """Power ratio in dB to a linear ratio."""
    return 10.0 ** (_finite(x, "dB value") / 10.0)


def linear_to_db(x: float) -> float:
    x = _finite(x, "linear ratio")
    if x <= 0.0:
        raise ValueError(f"linear ratio must be positive to express in dB, got {x!r}")
    return 10.0 * math.log10(x)


def dbm_to_mw(x: float) -> float:
    """Absolute power in dBm to milliwatts."""
    return 10.0 ** (_finite(x, "dBm value") / 10.0)


def mw_to_dbm(x: float) -> float:
    x = _finite(x, "power")
    if x <= 0.0:
        raise ValueError(f"power must be positive to express in dBm, got {x!r}")
    return 10.0 * math.log10(x)


def check_sf(sf: int) -> int:
    if sf not in SPREADING_FACTORS:
        raise ValueError(f"spreading factor must be one of {SPREADING_FACTORS}, got {sf!r}")
    return int(sf)


@dataclass(frozen=True)
class PathLossModel:
    """Non-singular power law ``kappa * max(d, x_c) ** -eta``.

    ``x_c = 0`` is accepted as a test mode that recovers the singular law
    (and exact scale invariance of the SIR metrics).
    """

    kappa: float
    eta: float
    x_c: float = 1.0

    def __post_init__(self) -> None:
        if not (self.kappa > 0 and math.isfinite(self.kappa)):
            raise ValueError("kappa must be positive and finite")
        if not self.eta > 2:
            raise ValueError(f"path-loss exponent must be > 2, got {self.eta!r}")
        if not (self.x_c >= 0 and math.isfinite(self.x_c)):
            raise ValueError(f"critical distance must be >= 0, got {self.x_c!r}")

    def __call__(self, d: float) -> float:
        if d < 0:
            raise ValueError(f"distance must be non-negative, got {d!r}")
        r = max(d, self.x_c)
        if r == 0.0:
            return math.inf
        return self.kappa * r ** (-self.eta)

    def gain(self, d: np.ndarray) -> np.ndarray:
        """Vectorised path gain for an array of distances."""
        r = np.maximum(np.asarray(d, dtype=float), self.x_c)
        with np.errstate(divide="ignore"):
            return self.kappa * r ** (-self.eta)


@dataclass(frozen=True)
class RadioConfig:
    """Link-budget parameters, stored in the units the LoRaWAN tables use.

    Linear quantities (mW, kappa, noise power) are derived once and cached.
    """

    tx_power_dbm: float = 14.0
    bandwidth_hz: float = 125e3
    carrier_hz: float = 868.1e6
    noise_density_dbm_hz: float = -174.0
    noise_figure_db: float = 6.0
    eta: float = 3.0
    x_c: float = 1.0
    duty_cycle: float = 0.0033

    def __post_init__(self) -> None:
        for name in ("tx_power_dbm", "noise_density_dbm_hz", "noise_figure_db"):
            _finite(getattr(self, name), name)
        if not (self.bandwidth_hz > 0 and math.isfinite(self.bandwidth_hz)):
            raise ValueError("bandwidth must be positive")
        if not (self.carrier_hz > 0 and math.isfinite(self.carrier_hz)):
            raise ValueError("carrier frequency must be positive")
        if not self.eta > 2:
            raise ValueError(f"path-loss exponent must be > 2, got {self.eta!r}")
        if not (self.x_c >= 0 and math.isfinite(self.x_c)):
            raise ValueError(f"critical distance must be >= 0, got {self.x_c!r}")
        if not 0 < self.duty_cycle <= 1:
            raise ValueError(f"duty cycle must be in (0,1], got {self.duty_cycle!r}")

    @cached_property
    def tx_power_mw(self) -> float:
        return dbm_to_mw(self.tx_power_dbm)

    @cached_property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @cached_property
    def kappa(self) -> float:
        return (self.wavelength / (4.0 * math.pi)) ** 2

    @cached_property
    def noise_dbm(self) -> float:
        return self.noise_density_dbm_hz + self.noise_figure_db + 10.0 * math.log10(self.bandwidth_hz)

    @cached_property
    def noise_mw(self) -> float:
        return dbm_to_mw(self.noise_dbm)

    @cached_property
    def path_loss(self) -> PathLossModel:
        return PathLossModel(self.kappa, self.eta, self.x_c)


@dataclass(frozen=True)
class SnrThresholds:
    """Per-SF demodulation SNR thresholds, held in dB."""

    db: Mapping[int, float] = field(default_factory=lambda: dict(DEFAULT_SNR_THRESHOLDS_DB))

    def __post_init__(self) -> None:
        db = {check_sf(int(k)): _finite(v, f"SNR threshold for SF{k}") for k, v in dict(self.db).items()}
        object.__setattr__(self, "db", db)
        object.__setattr__(self, "_lin", {k: db_to_linear(v) for k, v in db.items()})

    def __getitem__(self, sf: int) -> float:
        return self.linear(sf)

    def linear(self, sf: int) -> float:
        try:
            return self._lin[sf]
        except KeyError:
            raise KeyError(f"no SNR threshold configured for SF{sf}") from None

    @classmethod
    def from_sequence(cls, values_db: Sequence[float]) -> SnrThresholds:
        if len(values_db) != len(SPREADING_FACTORS):
            raise ValueError(f"expected {len(SPREADING_FACTORS)} SNR thresholds, got {len(values_db)}")
        return cls(dict(zip(SPREADING_FACTORS, values_db)))


class SirMatrix:
    """Co-/inter-SF capture thresholds.

    ``threshold(i, j)`` is the linear SIR a packet at SF ``i`` needs against
    a colliding packet at SF ``j``.
    """

    def __init__(self, db: Sequence[Sequence[float]] = DEFAULT_SIR_MATRIX_DB):
        arr = np.array(db, dtype=float)
        n = len(SPREADING_FACTORS)
        if arr.shape != (n, n):
            raise ValueError(f"SIR matrix must be {n}x{n}, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("SIR matrix entries must be finite")
        arr.setflags(write=False)
        self._db = arr
        lin = 10.0 ** (arr / 10.0)
        lin.setflags(write=False)
        self._lin = lin

    @property
    def db(self) -> np.ndarray:
        return self._db

    @property
    def linear(self) -> np.ndarray:
        return self._lin

    def threshold(self, desired: int, interfering: int) -> float:
        i = check_sf(desired) - SPREADING_FACTORS[0]
        j = check_sf(interfering) - SPREADING_FACTORS[0]
        return float(self._lin[i, j])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SirMatrix) and np.array_equal(self._db, other._db)

    def __hash__(self) -> int:
        return hash(self._db.tobytes())

    def __repr__(self) -> str:
        return f"SirMatrix({self._db.tolist()!r})"


DEFAULT_SNR = SnrThresholds()
DEFAULT_SIR = SirMatrix()


def sir_threshold(desired: int, interfering: int, sir: SirMatrix = DEFAULT_SIR) -> float:
    return sir.threshold(desired, interfering)


def snr_threshold(sf: int, thresholds: SnrThresholds = DEFAULT_SNR) -> float:
    return thresholds.linear(check_sf(sf))
