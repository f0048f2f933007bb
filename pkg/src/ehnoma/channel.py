"""Nakagami-m channel power gains with partial relay selection.

Gains are drawn directly for the *estimated* channels: the estimation
error only enters the SINRs through the ``sigma_e2`` inflation terms, so
it never has to be sampled explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sysconfig import SystemParams


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream identified by (seed, stream_id).

    Streams with different ids come from independent Philox keys derived
    through ``SeedSequence``; the same pair always replays the same values.
    """
    seed: int
    stream_id: int

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class ChannelDraw:
    """Estimated power gains of the selected relay (scalars or equal-length arrays)."""
    g_sr: np.ndarray
    g_r1: np.ndarray
    g_r2: np.ndarray


def _gen(rng) -> np.random.Generator:
    return rng.generator() if isinstance(rng, RngStream) else rng


def sample_gamma_power(shape: int, mean_power: float, rng, size=None):
    """Gamma(shape, scale=mean_power/shape) as a sum of ``shape`` exponentials.

    ``rng`` is an RngStream or a numpy Generator.  Returns a float when
    ``size`` is None, otherwise an array.
    """
    if not mean_power > 0:
        raise ValueError(f"mean_power must be > 0, got {mean_power}")
    if shape < 1 or int(shape) != shape:
        raise ValueError(f"shape must be a positive integer, got {shape}")
    gen = _gen(rng)
    n = 1 if size is None else size
    dims = (n,) if np.isscalar(n) else tuple(n)
    e = gen.standard_exponential((int(shape),) + dims)
    out = e.sum(axis=0) * (mean_power / shape)
    return float(out[0]) if size is None else out


def draw_with_prs(params: SystemParams, rng, size=None) -> ChannelDraw:
    """One draw (or ``size`` draws) of the selected relay's three gains.

    The source picks the relay with the largest estimated source-relay
    gain; the user links are i.i.d. across relays and independent of that
    choice, so they are drawn fresh for the winner.
    """
    p = params
    gen = _gen(rng)
    n = 1 if size is None else size
    candidates = sample_gamma_power(p.m_sr, p.lambda_hat_sr, gen, size=(p.K, n))
    g_sr = candidates.max(axis=0)
    g_r1 = sample_gamma_power(p.m_r1, p.lambda_hat_r1, gen, size=n)
    g_r2 = sample_gamma_power(p.m_r2, p.lambda_hat_r2, gen, size=n)
    if size is None:
        return ChannelDraw(float(g_sr[0]), float(g_r1[0]), float(g_r2[0]))
    return ChannelDraw(g_sr, g_r1, g_r2)
