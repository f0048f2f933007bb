"""Outage, ergodic rate and throughput of energy-harvesting cooperative NOMA.

A source serves a near user U1 and a far user U2 through one of K
decode-and-forward relays, picked by partial relay selection.  Each relay
harvests its transmit energy from the source signal (time switching).
Links are Nakagami-m with imperfect channel estimates and imperfect SIC.
"""
from .sysconfig import ConfigError, DerivedThresholds, SystemParams, derive_thresholds, load_config, validate
from .outage import (outage, outage_asymptotic, outage_u1_icsi, outage_u1_perfect, outage_u2_icsi,
                     outage_u2_perfect, throughput)
from .rates import ergodic_rate, ergodic_rate_perfect, ergodic_rate_u1_icsi, ergodic_rate_u2_icsi, sum_rate
from .montecarlo import McConfig, McEstimate, mc_outage, mc_rates, mc_throughput, simulate
from .optimizer import PsoConfig, PsoResult, pso_maximize, pso_optimize_alpha

__all__ = [
    "ConfigError", "DerivedThresholds", "SystemParams", "derive_thresholds", "load_config", "validate",
    "outage", "outage_asymptotic", "outage_u1_icsi", "outage_u1_perfect", "outage_u2_icsi",
    "outage_u2_perfect", "throughput",
    "ergodic_rate", "ergodic_rate_perfect", "ergodic_rate_u1_icsi", "ergodic_rate_u2_icsi", "sum_rate",
    "McConfig", "McEstimate", "mc_outage", "mc_rates", "mc_throughput", "simulate",
    "PsoConfig", "PsoResult", "pso_maximize", "pso_optimize_alpha",
]
