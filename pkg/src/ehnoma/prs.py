"""Distribution of the source-relay gain selected by partial relay selection.

The selected gain X is the maximum of K i.i.d. Gamma(m, rate b) variates.
Its density is expanded into a finite sum of gamma-like kernels

    f_X(x) = sum_i w_i * x**(s_i - 1) * exp(-c_i * x)

by expanding F^{K-1} binomially and the truncated exponential series
(sum_{n<m} (b x)^n / n!)^k multinomially.  Every closed-form outage and
rate expression integrates some function of X against these kernels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def multinomial_index_set(k: int, m: int) -> tuple[tuple[tuple[int, ...], float, int], ...]:
    """All compositions (i_0, ..., i_{m-1}) of k with their multinomial weights.

    Each entry is ``(composition, weight, degree)`` where ``weight`` is
    k! / prod(i_r!) * prod((1/r!)**i_r) and ``degree`` = sum(r * i_r), so that

        (sum_{r<m} y**r / r!)**k == sum weight * y**degree.
    """
    if k < 0 or m < 1:
        raise ValueError("need k >= 0 and m >= 1")
    out = []

    def rec(prefix, remaining):
        if len(prefix) == m - 1:
            comp = prefix + (remaining,)
            log_w = math.lgamma(k + 1)
            degree = 0
            for r, i_r in enumerate(comp):
                log_w -= math.lgamma(i_r + 1) + i_r * math.lgamma(r + 1)
                degree += r * i_r
            out.append((comp, math.exp(log_w), degree))
            return
        for i in range(remaining + 1):
            rec(prefix + (i,), remaining - i)

    rec((), k)
    return tuple(out)


@lru_cache(maxsize=None)
def power_coefficients(k: int, m: int) -> tuple[float, ...]:
    """Coefficients of (sum_{r<m} y^r/r!)^k in powers of y, collected by degree."""
    coeffs = [0.0] * (k * (m - 1) + 1)
    for _, weight, degree in multinomial_index_set(k, m):
        coeffs[degree] += weight
    return tuple(coeffs)


@dataclass(frozen=True)
class DensityTerm:
    weight: float  # may be negative
    shape: int  # s_i: the kernel is x^(s_i - 1) e^{-c_i x}
    rate: float  # c_i


@lru_cache(maxsize=4096)
def prs_density_terms(K: int, m: int, b: float) -> tuple[DensityTerm, ...]:
    """Kernel expansion of the density of max of K Gamma(m, rate b) variates."""
    base = K * b**m / math.factorial(m - 1)
    terms = []
    for k in range(K):
        sign_binom = (-1) ** k * math.comb(K - 1, k)
        for p, coef in enumerate(power_coefficients(k, m)):
            if coef == 0.0:
                continue
            terms.append(DensityTerm(base * sign_binom * coef * b**p, m + p, (k + 1) * b))
    return tuple(terms)


def gamma_cdf(x, m: int, b: float):
    """CDF of Gamma(m, rate b) for integer m: 1 - e^{-bx} sum_{n<m} (bx)^n/n!."""
    y = b * np.asarray(x, dtype=float)
    acc = np.zeros_like(y)
    term = np.ones_like(y)
    for n in range(m):
        if n:
            term = term * y / n
        acc = acc + term
    return 1.0 - np.exp(-y) * acc


def gamma_survival(u, m: int, b: float):
    """1 - gamma_cdf, valid for u >= 0."""
    y = b * np.asarray(u, dtype=float)
    acc = np.zeros_like(y)
    term = np.ones_like(y)
    for n in range(m):
        if n:
            term = term * y / n
        acc = acc + term
    return np.exp(-y) * acc


def prs_cdf(x, K: int, m: int, b: float):
    """CDF of the selected gain: F_gamma(x)^K."""
    return gamma_cdf(x, m, b) ** K


def prs_pdf(x, K: int, m: int, b: float):
    """Density evaluated from the kernel expansion."""
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for t in prs_density_terms(K, m, b):
        total = total + t.weight * x ** (t.shape - 1) * np.exp(-t.rate * x)
    return total
