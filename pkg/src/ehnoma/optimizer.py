"""Particle swarm search for the energy-harvesting time fraction.

The swarm update is the plain two-term rule without inertia:

    v <- v + c1 u1 (pbest - x) + c2 u2 (gbest - x),   x <- clip(x + v, lo, hi)

with every particle starting at rest.  A velocity clamp is applied by
default because the un-damped rule can oscillate; ``strict=True`` turns it
off.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .montecarlo import McConfig, mc_throughput
from .outage import throughput
from .sysconfig import SystemParams

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PsoConfig:
    n_particles: int = 30
    n_iterations: int = 20
    accel_personal: float = 2.0
    accel_global: float = 2.0
    bounds: tuple[float, float] = (0.0, 1.0)
    seed: int = 2024
    max_velocity: float = 0.5
    strict: bool = False

    def __post_init__(self):
        if self.n_particles < 2:
            raise ValueError("n_particles must be >= 2")
        if self.n_iterations < 0:
            raise ValueError("n_iterations must be >= 0")
        lo, hi = self.bounds
        if not lo < hi:
            raise ValueError("bounds must satisfy lower < upper")


@dataclass(frozen=True)
class PsoResult:
    best_alpha: float
    best_objective: float
    trace: tuple[float, ...] = field(default=())


def _safe(fn, x):
    try:
        value = float(fn(x))
    except Exception as exc:  # noqa: BLE001 - any failure just disqualifies the position
        log.warning("objective failed at %.6g: %s", x, exc)
        return -math.inf
    return value if not math.isnan(value) else -math.inf


def pso_maximize(fn: Callable[[float], float], cfg: PsoConfig | None = None) -> PsoResult:
    """Maximise a scalar function on ``cfg.bounds``.

    ``trace[0]`` is the best initial value and ``trace[t]`` the global best
    after iteration t.
    """
    cfg = cfg or PsoConfig()
    rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.bounds
    x = rng.uniform(lo, hi, cfg.n_particles)
    v = np.zeros(cfg.n_particles)
    fit = np.array([_safe(fn, xi) for xi in x])
    pbest, pfit = x.copy(), fit.copy()
    g = int(np.argmax(pfit))  # first maximum: deterministic ordered reduction
    gbest, gfit = pbest[g], pfit[g]
    trace = [gfit]
    vmax = None if cfg.strict else cfg.max_velocity * (hi - lo)

    for _ in range(cfg.n_iterations):
        u1 = rng.uniform(size=cfg.n_particles)
        u2 = rng.uniform(size=cfg.n_particles)
        v = v + cfg.accel_personal * u1 * (pbest - x) + cfg.accel_global * u2 * (gbest - x)
        if vmax is not None:
            v = np.clip(v, -vmax, vmax)
        x = np.minimum(np.maximum(x + v, lo), hi)
        fit = np.array([_safe(fn, xi) for xi in x])
        better = fit > pfit
        pbest = np.where(better, x, pbest)
        pfit = np.where(better, fit, pfit)
        g = int(np.argmax(pfit))
        if pfit[g] > gfit:
            gbest, gfit = pbest[g], pfit[g]
        trace.append(gfit)
    return PsoResult(float(gbest), float(gfit), tuple(float(t) for t in trace))


def throughput_objective(params: SystemParams, backend="analytic", csi: str = "imperfect",
                         mc: McConfig | None = None) -> Callable[[float], float]:
    """Throughput as a function of alpha for the chosen outage backend.

    The Monte Carlo backend reuses one seed for every evaluation (common
    random numbers), so the objective is a deterministic function of alpha.
    """
    if callable(backend):
        return backend
    if backend == "analytic":
        return lambda a: throughput(params.replace(alpha=a), csi) if 0 < a < 1 else 0.0
    if backend == "montecarlo":
        mc = mc or McConfig(n_trials=200_000)

        def fn(a):
            if not 0 < a < 1:
                return 0.0
            return mc_throughput(params.replace(alpha=a), None, mc, csi).mean
        return fn
    raise ValueError(f"unknown objective backend {backend!r}")


def pso_optimize_alpha(params: SystemParams, objective="analytic", cfg: PsoConfig | None = None,
                       csi: str = "imperfect", mc: McConfig | None = None) -> PsoResult:
    """Throughput-maximising alpha; ``params.alpha`` is ignored."""
    return pso_maximize(throughput_objective(params, objective, csi, mc), cfg)
