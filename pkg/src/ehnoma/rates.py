"""Ergodic rates by quadrature of E[log2(1 + SINR)] = int (1 - F(z)) / (1 + z) dz.

Two realisations are provided.

``method="exact"`` (default) integrates the complementary CDF of the
end-to-end decode-and-forward SINR min(relay SINR, user SINR).  That
complementary CDF is itself a joint survival probability of the same form
as the outage expressions, so it is evaluated in closed form at each node.

``method="destination"`` follows the destination-bottleneck reduction:
the relay hop is dropped and 1 + SINR_user = (1 + P) / (1 + Q) with
P, Q products of the PRS gain and a shifted user gain, whose CDFs are
Bessel-K sums (``cdf_p``, ``cdf_q``).  It overestimates the rate when the
relay hop is the bottleneck, which is common under perfect CSI.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .outage import joint_survival, kernel_integral
from .prs import gamma_cdf, prs_cdf, prs_density_terms, prs_pdf
from .specfun import QuadratureSpec, integrate_interval, integrate_semi_infinite, log_bessel_k
from .sysconfig import SystemParams

log = logging.getLogger(__name__)

LN2 = math.log(2.0)
RATE_QUAD = QuadratureSpec(abs_tol=1e-7, rel_tol=1e-7, max_subdivisions=200, initial_cutoff=4.0)
CDF_QUAD = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-10, max_subdivisions=200)
# beyond this b_y * shift the alternating binomial terms of the closed form
# grow like e^{b_y shift} and cancel; quadrature is used instead
SHIFT_SWITCH = 1.0


class DegenerateVariableError(ValueError):
    """Q has no random signal part when beta == 0."""


@dataclass(frozen=True)
class RateCdfParams:
    """Scales and shifts of the P/Q variables for one user.

    P = scale_p * X * (Y + shift_p),  Q = scale_q * X * (Y + shift_q).
    """
    scale_p: float
    shift_p: float
    scale_q: float
    shift_q: float
    m_y: int
    b_y: float

    @classmethod
    def for_user(cls, params: SystemParams, user: int) -> "RateCdfParams":
        p = params
        eh = p.eh_gain
        if user == 1:
            signal = eh * (p.a1 + p.beta * p.a2)
            residual = eh * p.beta * p.a2
            shift_q = p.sigma_e2 * (p.a1 + p.beta * p.a2) / (p.beta * p.a2) if p.beta > 0 else math.inf
            return cls(signal, p.sigma_e2, residual, shift_q, p.m_r1, p.rate_r1)
        if user == 2:
            return cls(eh, p.sigma_e2, eh * p.a1, p.sigma_e2 / p.a1, p.m_r2, p.rate_r2)
        raise ValueError("user must be 1 or 2")


# ---------------------------------------------------------------------------
# Bessel-form CDFs of the P/Q variables
# ---------------------------------------------------------------------------

def shifted_product_cdf(z: float, scale: float, shift: float, params: SystemParams,
                        m_y: int, b_y: float) -> float:
    """CDF of W = scale * X * (Y + shift), X the PRS gain, Y ~ Gamma(m_y, rate b_y).

    W <= z means X < t/shift and Y <= t/X - shift with t = z/scale.  Each
    term of the user survival polynomial is a kernel integral over
    (0, t/shift): the half-line value 2 (g/c)^{v/2} K_v(2 sqrt(g c)) minus
    the tail beyond t/shift.  Without that tail the polynomial would be
    continued where it is not a probability and the CDF would bend
    downwards near z = 0.
    """
    if z <= 0:
        return 0.0
    t = z / scale
    edge = t / shift if shift > 0 else math.inf
    if b_y * shift > SHIFT_SWITCH:
        return _shifted_product_cdf_quad(t, shift, params, m_y, b_y)
    density = prs_density_terms(params.K, params.m_sr, params.rate_sr)
    d = b_y * t
    total = 0.0
    for n in range(m_y):
        for j in range(n + 1):
            if n - j and shift == 0:
                continue
            coef = b_y**n / math.factorial(n) * math.comb(n, j) * t**j
            if n - j:
                coef *= (-shift) ** (n - j)
            for term in density:
                v = term.shape - j
                arg = 2.0 * math.sqrt(d * term.rate)
                full = 2.0 * math.exp(0.5 * v * (math.log(d) - math.log(term.rate)) + log_bessel_k(v, arg))
                if math.isfinite(edge):
                    full -= kernel_integral(v, term.rate, d, edge)
                total += coef * term.weight * full
    head = 1.0 if math.isinf(edge) else float(prs_cdf(edge, params.K, params.m_sr, params.rate_sr))
    value = head - math.exp(b_y * shift) * total
    if value < -1e-6 or value > 1 + 1e-6:
        log.warning("P/Q CDF %.4g outside [0, 1] at z=%g", value, z)
    return min(1.0, max(0.0, value))


def _shifted_product_cdf_quad(t: float, shift: float, params: SystemParams, m_y: int, b_y: float) -> float:
    """Same CDF by direct quadrature over the support X < t/shift."""
    p = params
    # the selected gain has survival below ~1e-20 past `cap`
    cap = (p.m_sr + 50.0 + 10.0 * math.sqrt(p.m_sr)) / p.rate_sr
    edge = min(t / shift, cap)
    f = lambda x: float(gamma_cdf(t / x - shift, m_y, b_y) * prs_pdf(x, p.K, p.m_sr, p.rate_sr)) if x > 0 else 0.0
    return min(1.0, max(0.0, integrate_interval(f, 0.0, edge, CDF_QUAD)))


def cdf_p(params: SystemParams, z: float, user: int = 1) -> float:
    c = RateCdfParams.for_user(params, user)
    return shifted_product_cdf(z, c.scale_p, c.shift_p, params, c.m_y, c.b_y)


def cdf_q(params: SystemParams, z: float, user: int = 1) -> float:
    if user == 1 and params.beta == 0:
        raise DegenerateVariableError("Q is degenerate for beta = 0; use the perfect-SIC path")
    c = RateCdfParams.for_user(params, user)
    return shifted_product_cdf(z, c.scale_q, c.shift_q, params, c.m_y, c.b_y)


def _log_moment(cdf) -> float:
    """E[ln(1 + W)] = int_0^inf (1 - F_W(z)) / (1 + z) dz, via z = e^u - 1."""
    # the tails of 1 - F decay like exp(-sqrt(z)); the substitution keeps
    # the semi-infinite range short
    f = lambda u: (1.0 - cdf(math.expm1(u))) if u > 0 else 1.0
    return integrate_semi_infinite(f, RATE_QUAD)


def _destination_rate(params: SystemParams, user: int) -> float:
    p = params
    c = RateCdfParams.for_user(p, user)
    e_p = _log_moment(lambda z: shifted_product_cdf(z, c.scale_p, c.shift_p, p, c.m_y, c.b_y))
    if user == 1 and p.beta == 0:
        # Q = eh * a1 * sigma_e2 * X: only the CEE term survives
        coef = p.eh_gain * p.a1 * p.sigma_e2
        if coef == 0:
            e_q = 0.0
        else:
            e_q = _log_moment(lambda z: float(prs_cdf(z / coef, p.K, p.m_sr, p.rate_sr)))
    else:
        e_q = _log_moment(lambda z: shifted_product_cdf(z, c.scale_q, c.shift_q, p, c.m_y, c.b_y))
    return 0.5 * (1.0 - p.alpha) / LN2 * (e_p - e_q)


# ---------------------------------------------------------------------------
# exact end-to-end rates
# ---------------------------------------------------------------------------

def min_sinr_survival(params: SystemParams, user: int, g: float) -> float:
    """Pr{min(relay SINR, user SINR) > g} for the symbol of ``user``."""
    p = params
    if g <= 0:
        return 1.0
    eh = 2.0 * p.alpha * p.mu * p.rho / (1.0 - p.alpha)
    if user == 1:
        d = p.a1 - p.beta * p.a2 * g
        if d <= 0:
            return 0.0
        lower = g * (p.sigma_e2 * (p.a1 + p.beta * p.a2) + 1.0 / p.rho) / d
        lam = g / (d * eh)
        omega = g * (p.a1 + p.beta * p.a2) * p.sigma_e2 / d
        m_y, b_y = p.m_r1, p.rate_r1
    elif user == 2:
        d = p.a2 - p.a1 * g
        if d <= 0:
            return 0.0
        lower = g * (p.sigma_e2 + 1.0 / p.rho) / d
        lam = g / (d * eh)
        omega = g * p.sigma_e2 / d
        m_y, b_y = p.m_r2, p.rate_r2
    else:
        raise ValueError("user must be 1 or 2")
    value = joint_survival(p, lower, [(lam, omega)], m_y, b_y)
    return min(1.0, max(0.0, value))


def _sinr_ceiling(params: SystemParams, user: int) -> float:
    p = params
    if user == 1:
        return p.a1 / (p.beta * p.a2) if p.beta > 0 else math.inf
    return p.a2 / p.a1


def _exact_rate(params: SystemParams, user: int) -> float:
    p = params
    # with g = e^u - 1 the weight 1/(1+g) cancels and a huge ceiling
    # (small beta) becomes a short range in u
    f = lambda u: min_sinr_survival(p, user, math.expm1(u)) if u > 0 else 1.0
    top = _sinr_ceiling(p, user)
    if math.isfinite(top):
        value = integrate_interval(f, 0.0, math.log1p(top), RATE_QUAD)
    else:
        value = integrate_semi_infinite(f, RATE_QUAD)
    return 0.5 * (1.0 - p.alpha) / LN2 * value


def _rate(params: SystemParams, user: int, method: str) -> float:
    if method == "exact":
        return _exact_rate(params, user)
    if method == "destination":
        return _destination_rate(params, user)
    raise ValueError(f"unknown rate method {method!r}")


def ergodic_rate_u1_icsi(params: SystemParams, method: str = "exact") -> float:
    return _rate(params, 1, method)


def ergodic_rate_u2_icsi(params: SystemParams, method: str = "exact") -> float:
    return _rate(params, 2, method)


def ergodic_rate_perfect(params: SystemParams, user: int, method: str = "exact") -> float:
    return _rate(params.perfect(), user, method)


def ergodic_rate(params: SystemParams, user: int, csi: str = "imperfect", method: str = "exact") -> float:
    if csi == "perfect":
        return ergodic_rate_perfect(params, user, method)
    if csi != "imperfect":
        raise ValueError(f"unknown csi mode {csi!r}")
    return _rate(params, user, method)


def sum_rate(params: SystemParams, csi: str = "imperfect", method: str = "exact") -> float:
    return ergodic_rate(params, 1, csi, method) + ergodic_rate(params, 2, csi, method)
