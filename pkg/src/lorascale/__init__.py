"""Analytical and Monte Carlo uplink success/coverage for single-cell LoRa networks."""

from .core import (
    DEFAULT_SIR,
    DEFAULT_SNR,
    SPREADING_FACTORS,
    PathLossModel,
    RadioConfig,
    SirMatrix,
    SnrThresholds,
    db_to_linear,
    dbm_to_mw,
    linear_to_db,
    mw_to_dbm,
    sir_threshold,
    snr_threshold,
)
from .geometry import Deployment, SfPlan, make_plan, plan_eab, plan_eib, plan_plb
from .network import Cell

__all__ = [
    "DEFAULT_SIR",
    "DEFAULT_SNR",
    "SPREADING_FACTORS",
    "Cell",
    "Deployment",
    "PathLossModel",
    "RadioConfig",
    "SfPlan",
    "SirMatrix",
    "SnrThresholds",
    "db_to_linear",
    "dbm_to_mw",
    "linear_to_db",
    "make_plan",
    "mw_to_dbm",
    "plan_eab",
    "plan_eib",
    "plan_plb",
    "sir_threshold",
    "snr_threshold",
]
