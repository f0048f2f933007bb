"""Relay power, the five link SINRs and per-draw outage / rate values.

All functions broadcast over numpy arrays so a Monte Carlo batch is one call.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelDraw
from .sysconfig import DerivedThresholds, SystemParams


@dataclass(frozen=True)
class SinrSet:
    g_r2_at_relay: np.ndarray
    g_r1_at_relay: np.ndarray
    g_12_at_u1: np.ndarray
    g_11_at_u1: np.ndarray
    g_22_at_u2: np.ndarray


def relay_power(params: SystemParams, g_sr):
    """Harvested relay transmit SNR 2 rho mu alpha g_sr / (1 - alpha)."""
    p = params
    return 2.0 * p.rho * p.mu * np.asarray(g_sr, dtype=float) * p.alpha / (1.0 - p.alpha)


def compute_sinrs(params: SystemParams, draw: ChannelDraw) -> SinrSet:
    p = params
    rho, s2, a1, a2, beta = p.rho, p.sigma_e2, p.a1, p.a2, p.beta
    x = np.asarray(draw.g_sr, dtype=float)
    y1 = np.asarray(draw.g_r1, dtype=float)
    y2 = np.asarray(draw.g_r2, dtype=float)
    pr = relay_power(p, x)
    residual = a1 + beta * a2  # power left after imperfect SIC, inflated by CEE

    r2_relay = x * rho * a2 / (x * rho * a1 + rho * s2 + 1.0)
    r1_relay = x * rho * a1 / (x * beta * rho * a2 + rho * s2 * residual + 1.0)
    u1_x2 = y1 * pr * a2 / (y1 * pr * a1 + pr * s2 + 1.0)
    u1_x1 = y1 * pr * a1 / (y1 * beta * pr * a2 + pr * s2 * residual + 1.0)
    u2_x2 = y2 * pr * a2 / (y2 * pr * a1 + pr * s2 + 1.0)
    return SinrSet(r2_relay, r1_relay, u1_x2, u1_x1, u2_x2)


def outage_events(params: SystemParams, th: DerivedThresholds, s: SinrSet):
    """Boolean outage flags (u1_out, u2_out), elementwise over the draws."""
    g1, g2 = th.gamma_th1, th.gamma_th2
    u2_ok = (s.g_r2_at_relay >= g2) & (s.g_22_at_u2 >= g2)
    u1_ok = ((s.g_r2_at_relay >= g2) & (s.g_r1_at_relay >= g1)
             & (s.g_12_at_u1 >= g2) & (s.g_11_at_u1 >= g1))
    return ~u1_ok, ~u2_ok


def instantaneous_rates(params: SystemParams, s: SinrSet):
    """Decode-and-forward rates: the weaker hop limits each symbol."""
    pre = 0.5 * (1.0 - params.alpha)
    r1 = pre * np.log2(1.0 + np.minimum(s.g_r1_at_relay, s.g_11_at_u1))
    r2 = pre * np.log2(1.0 + np.minimum(s.g_r2_at_relay, s.g_22_at_u2))
    return r1, r2
