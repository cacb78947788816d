"""Monte Carlo estimates of success and coverage probabilities.

Every realisation draws the desired link's fading gain and a fresh Poisson
field of active devices, then tests all four reception conditions on the
same draws.  Realisations are processed in fixed-size blocks; block ``b`` of
stream ``s`` gets its own Philox generator keyed by ``(seed, s, b)``, so the
result does not depend on how many workers process the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import sample_active_batch
from .network import Cell
from .propagation import exp_from_uniform, uniform_open_closed

BLOCK = 8192
METRICS = ("snr", "sir_dom", "sir_cosf", "sir_joint")


@dataclass(frozen=True)
class SimSpec:
    trials: int = 100_000
    seed: int = 20190601
    capture: str = "sum"  # "sum": sum_j delta_ij I_j <= S ; "max": every class passes on its own
    workers: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.capture not in ("sum", "max"):
            raise ValueError(f"capture mode must be 'sum' or 'max', got {self.capture!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class SimEstimate:
    p: float
    half_width: float
    trials: int

    @classmethod
    def from_count(cls, successes: int, trials: int) -> SimEstimate:
        p = successes / trials
        return cls(p, 1.96 * math.sqrt(p * (1.0 - p) / trials), trials)


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(stream, block))
    return np.random.Generator(np.random.Philox(ss))


def _interference(cell: Cell, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-realisation summed and strongest received interference power (path gain x fading) per annulus."""
    k = cell.plan.k
    dev = sample_active_batch(cell.plan, cell.deployment, rng, n)
    power = dev.gain * cell.radio.path_loss.gain(dev.distance)
    flat = dev.owner * k + (dev.annulus - 1)
    total = np.bincount(flat, weights=power, minlength=n * k).reshape(n, k)
    strongest = np.zeros(n * k)
    np.maximum.at(strongest, flat, power)
    return total, strongest.reshape(n, k)


def _count_block(cell: Cell, x1: np.ndarray | None, spec: SimSpec, stream: int, block: int, n: int) -> np.ndarray:
    rng = block_rng(spec.seed, stream, block)
    if x1 is None:
        # coverage: desired device area-uniform over the disk
        desired = cell.plan.radius * np.sqrt(rng.random(n))
        desired = np.minimum(desired, np.nextafter(cell.plan.radius, 0.0))
    else:
        desired = x1
    h = exp_from_uniform(uniform_open_closed(rng, n))
    total, strongest = _interference(cell, rng, n)

    ann = np.searchsorted(np.asarray(cell.plan.boundaries[1:]), desired, side="right")
    ann = np.broadcast_to(ann, (n,))
    rows = np.arange(n)
    signal = h * cell.radio.path_loss.gain(desired)
    delta = cell.delta[ann]
    own = delta[rows, ann]

    ok_snr = cell.radio.tx_power_mw * signal >= cell.radio.noise_mw * cell.theta[ann]
    ok_dom = signal >= own * strongest[rows, ann]
    ok_cosf = signal >= own * total[rows, ann]
    if spec.capture == "sum":
        ok_joint = signal >= (delta * total).sum(axis=1)
    else:
        ok_joint = np.all(signal[:, None] >= delta * total, axis=1)
    return np.array([ok_snr.sum(), ok_dom.sum(), ok_cosf.sum(), ok_joint.sum()], dtype=np.int64)


def _run(cell: Cell, x1: float | None, spec: SimSpec, stream: int) -> dict[str, SimEstimate]:
    if x1 is not None:
        x1 = float(x1)
        cell.plan.annulus_of(x1)  # range check
    sizes = [min(BLOCK, spec.trials - s) for s in range(0, spec.trials, BLOCK)]
    jobs = [(b, n) for b, n in enumerate(sizes)]

    def work(job):
        b, n = job
        return _count_block(cell, x1, spec, stream, b, n)

    if spec.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(spec.workers) as pool:
            counts = list(pool.map(work, jobs))
    else:
        counts = [work(j) for j in jobs]
    # integer counts: the reduction is exact whatever the completion order
    tot = np.sum(counts, axis=0)
    return {m: SimEstimate.from_count(int(c), spec.trials) for m, c in zip(METRICS, tot)}


def simulate_success(x1: float, cell: Cell, spec: SimSpec = SimSpec(), stream: int = 0) -> dict[str, SimEstimate]:
    """Success frequencies of a device fixed at ``x1``, keyed by ``METRICS``."""
    return _run(cell, x1, spec, stream)


def simulate_coverage(cell: Cell, spec: SimSpec = SimSpec(), stream: int = 0) -> dict[str, SimEstimate]:
    """Success frequencies of a device placed uniformly over the cell."""
    return _run(cell, None, spec, stream)


def simulate_sweep(distances: Sequence[float], cell: Cell, spec: SimSpec = SimSpec()) -> list[dict[str, SimEstimate]]:
    # one stream per grid point keeps points statistically independent
    return [simulate_success(x, cell, spec, stream=k) for k, x in enumerate(distances)]
