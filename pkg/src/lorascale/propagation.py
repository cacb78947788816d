"""Path loss, receiver noise and Rayleigh power-gain draws."""

from __future__ import annotations

import numpy as np

from .core import PathLossModel, RadioConfig


def path_loss(d: float, model: PathLossModel) -> float:
    """Linear path gain ``kappa * max(d, x_c) ** -eta`` at distance ``d`` (m)."""
    return model(d)


def noise_power(cfg: RadioConfig) -> float:
    """Thermal noise plus receiver noise figure over the channel bandwidth, in mW."""
    return cfg.noise_mw


def mean_snr(d: float, cfg: RadioConfig) -> float:
    """Fading-free SNR (linear) of a device at distance ``d``."""
    return cfg.tx_power_mw * cfg.path_loss(d) / cfg.noise_mw


def uniform_open_closed(rng: np.random.Generator, size=None):
    """Uniform variates on (0, 1]."""
    return 1.0 - rng.random(size)


def exp_from_uniform(u):
    return -np.log(u)


def draw_fading(rng: np.random.Generator, size=None):
    """Rayleigh power gain |h|^2 ~ Exp(1), by inverse transform of a (0, 1] uniform.

    Returns a float when ``size`` is None, else an array.
    """
    g = exp_from_uniform(uniform_open_closed(rng, size))
    return float(g) if size is None else g
