"""Goel-Okumoto NHPP sample paths by inversion of the mean value function.

Random numbers come from numpy's PCG64 bit generator seeded with
``SeedSequence([seed, replication])``; only ``Generator.random`` (uniform
doubles) is used, whose stream numpy keeps stable across releases.
Unit-rate exponential gaps are ``-log1p(-U)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .failure_data import FailureSeries
from .go_model import GoParams, mean_value, mean_value_inverse

__all__ = ["RNG_ALGORITHM", "SimConfig", "horizon_for_expected", "simulate_many", "simulate_nhpp"]

RNG_ALGORITHM = "numpy PCG64 / SeedSequence([seed, replication]) / Generator.random"


@dataclass(frozen=True)
class SimConfig:
    params: GoParams
    horizon: float
    seed: int = 0
    replications: int = 1

    def __post_init__(self):
        if not (self.horizon > 0):
            raise ValueError(f"horizon must be > 0, got {self.horizon!r}")
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications!r}")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def expected_count(self) -> float:
        return mean_value(self.params, self.horizon)


def horizon_for_expected(params: GoParams, expected: float) -> float:
    """Horizon T with m(T) = expected (must be below a)."""
    return mean_value_inverse(params, expected)


def _rng(seed: int, replication: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, replication])))


def simulate_nhpp(cfg: SimConfig, replication: int = 0) -> FailureSeries | None:
    """One replication of inter-failure times on [0, horizon].

    Returns None when no failure falls inside the horizon.
    """
    rng = _rng(cfg.seed, replication)
    params = cfg.params
    m_end = cfg.expected_count
    epochs: list[float] = []
    tau = 0.0
    last = 0.0
    batch = max(16, int(m_end + 4 * math.sqrt(m_end) + 8))
    while True:
        gaps = -np.log1p(-rng.random(batch))
        for gap in gaps:
            tau += gap
            if tau >= m_end:
                break
            t = float(mean_value_inverse(params, tau))
            if t <= last:
                # rounding tie; draw the next arrival instead
                continue
            epochs.append(t)
            last = t
        else:
            continue
        break
    if not epochs:
        return None
    deltas = np.diff(np.concatenate(([0.0], epochs)))
    return FailureSeries(tuple(deltas.tolist()), source_label=f"simulated seed={cfg.seed} rep={replication}")


def simulate_many(cfg: SimConfig) -> list[FailureSeries | None]:
    return [simulate_nhpp(cfg, rep) for rep in range(cfg.replications)]
