"""Monte Carlo estimates of outage, ergodic rates and throughput.

Trials are split into fixed-size batches and batch ``b`` always draws from
``RngStream(seed, b)``.  Partial sums are merged in batch order, so the
estimates are bit-identical whatever the number of worker threads.
"""
from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable, Sequence

import numpy as np

from .channel import RngStream, draw_with_prs
from .sinr import compute_sinrs, instantaneous_rates, outage_events
from .sysconfig import DerivedThresholds, SystemParams, derive_thresholds

log = logging.getLogger(__name__)

MIN_TRIALS = 10_000


class SmallSampleWarning(UserWarning):
    """n_trials is below the size the declared tolerances assume."""


@dataclass(frozen=True)
class McConfig:
    n_trials: int = 1_000_000
    seed: int = 12345
    batch_size: int = 65_536
    confidence_level: float = 0.99
    workers: int = 1

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if not 0 < self.confidence_level < 1:
            raise ValueError("confidence_level must lie in (0, 1)")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.n_trials < MIN_TRIALS:
            warnings.warn(
                f"n_trials={self.n_trials} < {MIN_TRIALS}: confidence intervals are too wide "
                "for the declared analytic-vs-MC tolerances",
                SmallSampleWarning, stacklevel=3,
            )

    @property
    def z(self) -> float:
        return NormalDist().inv_cdf(0.5 + 0.5 * self.confidence_level)

    @property
    def n_batches(self) -> int:
        return -(-self.n_trials // self.batch_size)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    half_width: float
    n: int

    @property
    def low(self) -> float:
        return self.mean - self.half_width

    @property
    def high(self) -> float:
        return self.mean + self.half_width


def wilson_interval(successes: int, n: int, z: float) -> tuple[float, float]:
    p = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    spread = z / denom * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n))
    return center - spread, center + spread


def proportion_estimate(successes: int, n: int, z: float) -> McEstimate:
    """Empirical frequency with a half-width wide enough to cover the Wilson interval."""
    p = successes / n
    lo, hi = wilson_interval(successes, n, z)
    return McEstimate(p, max(hi - p, p - lo, 0.0), n)


def mean_estimate(total: float, total_sq: float, n: int, z: float) -> McEstimate:
    mean = float(total) / n
    var = max(float(total_sq) / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return McEstimate(mean, z * math.sqrt(var / n), n)


# ---------------------------------------------------------------------------
# batch engine
# ---------------------------------------------------------------------------

BatchFn = Callable[[np.random.Generator, int], Sequence[float]]


def run_batches(cfg: McConfig, batch_fn: BatchFn) -> np.ndarray:
    """Sum ``batch_fn(generator, size)`` over all batches, merged in batch order."""
    def one(b: int):
        size = min(cfg.batch_size, cfg.n_trials - b * cfg.batch_size)
        return np.asarray(batch_fn(RngStream(cfg.seed, b).generator(), size), dtype=float)

    batches = range(cfg.n_batches)
    if cfg.workers == 1:
        parts = [one(b) for b in batches]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(one, batches))
    total = np.zeros_like(parts[0])
    for part in parts:
        total = total + part
    return total


def _link_batch(params: SystemParams, th: DerivedThresholds) -> BatchFn:
    def fn(gen, size):
        s = compute_sinrs(params, draw_with_prs(params, gen, size))
        out1, out2 = outage_events(params, th, s)
        r1, r2 = instantaneous_rates(params, s)
        return (out1.sum(), out2.sum(), r1.sum(), (r1 * r1).sum(), r2.sum(), (r2 * r2).sum())
    return fn


@dataclass(frozen=True)
class McSummary:
    outage_u1: McEstimate
    outage_u2: McEstimate
    rate_u1: McEstimate
    rate_u2: McEstimate


def simulate(params: SystemParams, cfg: McConfig, th: DerivedThresholds | None = None) -> McSummary:
    """All per-draw statistics from one pass over the trials."""
    th = derive_thresholds(params) if th is None else th
    t = run_batches(cfg, _link_batch(params, th))
    n, z = cfg.n_trials, cfg.z
    return McSummary(
        proportion_estimate(int(t[0]), n, z),
        proportion_estimate(int(t[1]), n, z),
        mean_estimate(t[2], t[3], n, z),
        mean_estimate(t[4], t[5], n, z),
    )


def _csi(params: SystemParams, csi: str) -> SystemParams:
    if csi == "perfect":
        return params.perfect()
    if csi != "imperfect":
        raise ValueError(f"unknown csi mode {csi!r}")
    return params


def mc_outage(params: SystemParams, th: DerivedThresholds | None = None,
              cfg: McConfig | None = None, csi: str = "imperfect") -> tuple[McEstimate, McEstimate]:
    p = _csi(params, csi)
    s = simulate(p, cfg or McConfig(), th)
    return s.outage_u1, s.outage_u2


def mc_rates(params: SystemParams, cfg: McConfig | None = None,
             csi: str = "imperfect") -> tuple[McEstimate, McEstimate]:
    p = _csi(params, csi)
    s = simulate(p, cfg or McConfig())
    return s.rate_u1, s.rate_u2


def throughput_from_outage(params: SystemParams, u1: McEstimate, u2: McEstimate) -> McEstimate:
    """Delay-limited throughput from outage estimates, CI propagated linearly."""
    pre = 0.5 * (1.0 - params.alpha)
    mean = pre * ((1.0 - u1.mean) * params.r1 + (1.0 - u2.mean) * params.r2)
    half = pre * (params.r1 * u1.half_width + params.r2 * u2.half_width)
    return McEstimate(mean, half, min(u1.n, u2.n))


def mc_throughput(params: SystemParams, th: DerivedThresholds | None = None,
                  cfg: McConfig | None = None, csi: str = "imperfect") -> McEstimate:
    u1, u2 = mc_outage(params, th, cfg, csi)
    return throughput_from_outage(_csi(params, csi), u1, u2)
