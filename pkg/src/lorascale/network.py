from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core import DEFAULT_SIR, RadioConfig, SirMatrix, SnrThresholds
from .geometry import Deployment, SfPlan


@dataclass(frozen=True, eq=False)
class Cell:
    """Everything needed to evaluate a single-gateway LoRa cell.

    Bundles the radio link budget, the SF plan, the mean device count and
    the threshold tables.  The deployment uses the radio's duty cycle.
    """

    radio: RadioConfig
    plan: SfPlan
    n_bar: float
    sir: SirMatrix = DEFAULT_SIR
    snr: SnrThresholds = field(default_factory=SnrThresholds)

    @cached_property
    def deployment(self) -> Deployment:
        return Deployment(self.plan, self.n_bar, self.radio.duty_cycle)

    @cached_property
    def delta(self) -> np.ndarray:
        """K x K linear capture thresholds indexed by (desired annulus, interfering annulus), 0-based."""
        k = self.plan.k
        out = np.empty((k, k))
        for i, sf_i in enumerate(self.plan.sfs):
            for j, sf_j in enumerate(self.plan.sfs):
                out[i, j] = self.sir.threshold(sf_i, sf_j)
        out.setflags(write=False)
        return out

    @cached_property
    def theta(self) -> np.ndarray:
        """Linear SNR threshold per annulus, 0-based."""
        out = np.array([self.snr.linear(sf) for sf in self.plan.sfs])
        out.setflags(write=False)
        return out

    def with_devices(self, n_bar: float) -> Cell:
        return Cell(self.radio, self.plan, n_bar, self.sir, self.snr)
