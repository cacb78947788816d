"""Run configuration: an INI-style file with [radio], [deployment], [grid] and [sim] sections.

Every key is optional; missing keys take the LoRaWAN EU868 defaults
(14 dBm, 125 kHz, 868.1 MHz, 0.33 % duty cycle, eta = 3), the
equal-interval SF plan, 1500 devices and a 6 km cell.

Example::

    [radio]
    tx_power_dbm = 14
    alpha = 0.0033
    sir_matrix_db = 1 -8 -9 -9 -9 -9; -11 1 -11 -12 -13 -13; ...

    [deployment]
    scheme = eab
    radius_m = 9860

    [grid]
    coverage_devices = 100:3000:30     # start:stop:count, or a comma list

    [sim]
    trials = 100000
    seed = 7
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .core import DEFAULT_SIR, SPREADING_FACTORS, RadioConfig, SirMatrix, SnrThresholds
from .coverage import PRESETS
from .geometry import SCHEMES


class ConfigError(ValueError):
    pass


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in re.split(r"[,\s]+", text.strip()) if t)


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in re.split(r"[,\s]+", text.strip()) if t)


def _axis(text: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        start, stop, num = text.split(":")
        n = int(num)
        if n < 1:
            raise ValueError("point count must be >= 1")
        return tuple(float(v) for v in np.linspace(float(start), float(stop), n))
    vals = _floats(text)
    if not vals:
        raise ValueError("empty list")
    return vals


def _matrix(text: str) -> tuple[tuple[float, ...], ...]:
    rows = [r for r in re.split(r"[;\n]", text) if r.strip()]
    return tuple(_floats(r) for r in rows)


def _choice(options) -> Callable[[str], str]:
    def parse(text: str) -> str:
        v = text.strip().lower()
        if v not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return v
    return parse


# section -> key -> (parser, RunConfig field)
SCHEMA: dict[str, dict[str, tuple[Callable[[str], Any], str]]] = {
    "radio": {
        "tx_power_dbm": (float, "tx_power_dbm"),
        "bandwidth_hz": (float, "bandwidth_hz"),
        "carrier_hz": (float, "carrier_hz"),
        "noise_density_dbm_hz": (float, "noise_density_dbm_hz"),
        "noise_figure_db": (float, "noise_figure_db"),
        "eta": (float, "eta"),
        "critical_distance_m": (float, "x_c"),
        "alpha": (float, "duty_cycle"),
        "snr_thresholds_db": (_floats, "snr_thresholds_db"),
        "sir_matrix_db": (_matrix, "sir_matrix_db"),
    },
    "deployment": {
        "scheme": (_choice(SCHEMES), "scheme"),
        "radius_m": (float, "radius_m"),
        "devices": (float, "n_bar"),
        "spreading_factors": (_ints, "sfs"),
    },
    "grid": {
        "points": (int, "points"),
        "validate_points": (int, "validate_points"),
        "coverage_devices": (_axis, "coverage_devices"),
        "contour_radii_m": (_axis, "contour_radii_m"),
        "contour_devices": (_axis, "contour_devices"),
        "contour_preset": (_choice(tuple(PRESETS)), "preset"),
    },
    "sim": {
        "trials": (int, "trials"),
        "seed": (int, "seed"),
        "capture": (_choice(("sum", "max")), "capture"),
        "workers": (int, "workers"),
        "output": (str, "output"),
    },
}


@dataclass(frozen=True)
class RunConfig:
    tx_power_dbm: float = 14.0
    bandwidth_hz: float = 125e3
    carrier_hz: float = 868.1e6
    noise_density_dbm_hz: float = -174.0
    noise_figure_db: float = 6.0
    eta: float = 3.0
    x_c: float = 1.0
    duty_cycle: float = 0.0033
    snr_thresholds_db: tuple[float, ...] = tuple(SnrThresholds().db[sf] for sf in SPREADING_FACTORS)
    sir_matrix_db: tuple[tuple[float, ...], ...] = tuple(tuple(r) for r in DEFAULT_SIR.db.tolist())
    scheme: str = "eib"
    radius_m: float = 6000.0
    n_bar: float = 1500.0
    sfs: tuple[int, ...] = SPREADING_FACTORS
    points: int = 200
    validate_points: int = 30
    coverage_devices: tuple[float, ...] = tuple(float(n) for n in range(100, 3001, 100))
    contour_radii_m: tuple[float, ...] = tuple(float(r) for r in np.linspace(1000.0, 15000.0, 15))
    contour_devices: tuple[float, ...] = tuple(float(n) for n in np.linspace(100.0, 4000.0, 20))
    preset: str = "h1.4"
    trials: int = 100_000
    seed: int = 20190601
    capture: str = "sum"
    workers: int = 1
    output: str | None = None
    radio: RadioConfig = field(init=False, repr=False, compare=False)
    snr: SnrThresholds = field(init=False, repr=False, compare=False)
    sir: SirMatrix = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        radio = RadioConfig(
            tx_power_dbm=self.tx_power_dbm,
            bandwidth_hz=self.bandwidth_hz,
            carrier_hz=self.carrier_hz,
            noise_density_dbm_hz=self.noise_density_dbm_hz,
            noise_figure_db=self.noise_figure_db,
            eta=self.eta,
            x_c=self.x_c,
            duty_cycle=self.duty_cycle,
        )
        object.__setattr__(self, "radio", radio)
        object.__setattr__(self, "snr", SnrThresholds.from_sequence(self.snr_thresholds_db))
        object.__setattr__(self, "sir", SirMatrix(self.sir_matrix_db))
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if not self.radius_m > 0:
            raise ValueError("cell radius must be positive")
        if not self.n_bar >= 0:
            raise ValueError("mean device count must be >= 0")
        if not self.sfs or len(set(self.sfs)) != len(self.sfs) or any(s not in SPREADING_FACTORS for s in self.sfs):
            raise ValueError(f"spreading factors must be distinct values from {SPREADING_FACTORS}")
        if self.points < len(self.sfs) or self.validate_points < len(self.sfs):
            raise ValueError("grid sizes must give at least one point per annulus")
        if any(n < 0 for n in self.coverage_devices + self.contour_devices):
            raise ValueError("device counts must be non-negative")
        if any(r <= 0 for r in self.contour_radii_m):
            raise ValueError("contour radii must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def override(self, **changes: Any) -> RunConfig:
        changes = {k: v for k, v in changes.items() if v is not None}
        try:
            return replace(self, **changes)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for n, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[([^\]]+)\]", s)
        if m:
            current = m.group(1).strip().lower()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", s, re.IGNORECASE):
            return n
    return None


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#",), comment_prefixes=("#",), empty_lines_in_values=False
    )
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    values: dict[str, Any] = {}
    for section in parser.sections():
        keys = SCHEMA.get(section.lower())
        if keys is None:
            raise ConfigError(f"{source}: unknown section [{section}]; expected one of {', '.join(SCHEMA)}")
        for key, raw in parser.items(section):
            where = _line_of(text, section.lower(), key)
            loc = f"{source}:{where}" if where else source
            if key not in keys:
                raise ConfigError(f"{loc}: unknown key '{key}' in [{section}]")
            conv, name = keys[key]
            try:
                values[name] = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{loc}: bad value for '{key}': {raw!r} ({exc})") from exc
    try:
        return RunConfig(**values)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_config(text, str(path))

