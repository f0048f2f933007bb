"""Special functions and quadrature used by the closed-form expressions.

Everything here is a pure function of its arguments.  ``ln_gamma`` and the
Bessel routines delegate to the standard library / scipy; the upper
incomplete gamma function is implemented locally because the outage
expressions need it for non-positive orders, in log space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, special

EULER_GAMMA = 0.57721566490153286061
_EPS = 2.0 * np.finfo(float).eps  # convergence test cannot ask for better than this
_TINY = 1e-300
_MAX_ITER = 10_000


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 200
    # Initial right end of the semi-infinite range; doubled until the
    # integral over the next block drops below abs_tol.
    initial_cutoff: float = 8.0
    max_doublings: int = 60

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ValueError("abs_tol and rel_tol must be positive")
        if self.max_subdivisions < 16:
            raise ValueError("max_subdivisions must be >= 16")
        if not self.initial_cutoff > 0:
            raise ValueError("initial_cutoff must be positive")


def ln_gamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


# ---------------------------------------------------------------------------
# Upper incomplete gamma
# ---------------------------------------------------------------------------

def _e1_small(x: float) -> float:
    """E1(x) by its power series, for 0 < x < 1."""
    total = 0.0
    term = 1.0
    for k in range(1, 200):
        term *= -x / k
        add = term / k
        total += add
        if abs(add) < _EPS * abs(total):
            break
    return -EULER_GAMMA - math.log(x) - total


def _log_gcf(s: float, x: float) -> float:
    """log Gamma(s, x) by the Lentz continued fraction; good for x >= 1."""
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0 else 1.0 / _TINY
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= _EPS:
            break
    else:
        raise QuadratureError(f"incomplete gamma continued fraction failed for s={s}, x={x}")
    return -x + s * math.log(x) + math.log(h)


def _lower_series(s: float, x: float) -> float:
    """gamma(s, x) * x**-s * e**x, the series part of the lower function (s > 0)."""
    ap = s
    term = 1.0 / s
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total
    raise QuadratureError(f"incomplete gamma series failed for s={s}, x={x}")


def _log_positive_integer(n: int, x: float) -> float:
    # Gamma(n, x) = (n-1)! e^{-x} sum_{k<n} x^k / k!, summed in log space
    logs = [k * math.log(x) - math.lgamma(k + 1) for k in range(n)] if x > 0 else [0.0]
    top = max(logs)
    acc = sum(math.exp(v - top) for v in logs)
    return math.lgamma(n) - x + top + math.log(acc)


@lru_cache(maxsize=200_000)
def log_upper_incomplete_gamma(s: float, x: float) -> float:
    """Natural log of Gamma(s, x) for real s and x > 0 (or x == 0 with s > 0).

    Gamma(s, x) is strictly positive for x > 0 whatever the sign of s, so
    the logarithm is always defined; working in logs keeps very negative
    orders with tiny arguments from overflowing.
    """
    if x < 0:
        raise DomainError(f"incomplete gamma requires x >= 0, got {x}")
    if x == 0:
        if s <= 0:
            raise DomainError(f"Gamma({s}, 0) diverges")
        return math.lgamma(s)
    s_int = float(s).is_integer()
    if s_int and s >= 1:
        return _log_positive_integer(int(s), x)
    if x >= 1.0 and (s <= 0 or x >= s + 1.0):
        return _log_gcf(s, x)
    if s > 0:
        if x < s + 1.0:
            lower = _lower_series(s, x) * math.exp(s * math.log(x) - x - math.lgamma(s))
            if lower < 0.9:
                return math.lgamma(s) + math.log1p(-lower)
        return _log_gcf(s, x)
    # s <= 0 and x < 1: scaled downward recurrence
    #   R(s) = Gamma(s, x) x^{-s} e^{x},  R(s-1) = (1 - x R(s)) / (1 - s)
    # which damps errors when x < 1.
    if s_int:
        start = 0.0
        r = _e1_small(x) * math.exp(x)
    else:
        start = s - math.floor(s)  # in (0, 1)
        g_start = math.exp(math.lgamma(start)) - _lower_series(start, x) * x**start * math.exp(-x)
        r = g_start * x ** (-start) * math.exp(x)
    cur = start
    while cur - s > 0.5:
        r = (1.0 - x * r) / (1.0 - cur)
        cur -= 1.0
    return math.log(r) + s * math.log(x) - x


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt.

    Positive integer orders use the exact finite sum; other orders use a
    continued fraction (x >= 1) or series/recurrence (x < 1).  Non-positive
    orders are allowed for x > 0.
    """
    return math.exp(log_upper_incomplete_gamma(float(s), float(x)))


def exp1(x: float) -> float:
    """Exponential integral E1(x) = Gamma(0, x)."""
    return upper_incomplete_gamma(0.0, x)


# ---------------------------------------------------------------------------
# Modified Bessel function of the second kind
# ---------------------------------------------------------------------------

def bessel_k(n: int, x):
    """K_n(x) for integer order; K_{-n} = K_n."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("bessel_k requires x > 0")
    out = special.kv(abs(int(n)), x)
    return float(out) if out.ndim == 0 else out


def log_bessel_k(n: int, x):
    """log K_n(x), finite even where K_n(x) underflows (x > ~700)."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("log_bessel_k requires x > 0")
    out = np.log(special.kve(abs(int(n)), x)) - x
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def _quad_block(f, a, b, spec: QuadratureSpec):
    value, err, info = integrate.quad(
        f, a, b, epsabs=spec.abs_tol / 4, epsrel=spec.rel_tol,
        limit=spec.max_subdivisions, full_output=1,
    )[:3]
    if info.get("last", 0) >= spec.max_subdivisions or err > max(spec.abs_tol, spec.rel_tol * abs(value)):
        raise QuadratureError(
            f"quadrature on [{a}, {b}] did not converge (estimate {value}, error {err})"
        )
    return value


def integrate_interval(f: Callable[[float], float], a: float, b: float,
                       spec: QuadratureSpec | None = None) -> float:
    """Adaptive Gauss-Kronrod integral of f over the finite interval [a, b]."""
    spec = spec or QuadratureSpec()
    if b <= a:
        return 0.0
    return _quad_block(f, a, b, spec)


def integrate_semi_infinite(f: Callable[[float], float],
                            spec: QuadratureSpec | None = None) -> float:
    """Integral of f over [0, inf) for exponentially decaying integrands.

    Integrates on [0, Z] and keeps appending [Z, 2Z] blocks until a block
    contributes less than ``abs_tol``.
    """
    spec = spec or QuadratureSpec()
    z = spec.initial_cutoff
    total = _quad_block(f, 0.0, z, spec)
    for _ in range(spec.max_doublings):
        block = _quad_block(f, z, 2.0 * z, spec)
        total += block
        z *= 2.0
        if abs(block) < spec.abs_tol / 2:
            return total
    raise QuadratureError(f"tail did not decay below {spec.abs_tol} by z={z}")
