"""Independent reference computations shared by the test modules.

Nothing here reuses the closed-form machinery: success probabilities are
direct one-dimensional quadratures of the defining events with scipy's
gamma distribution, and rates come from the same events integrated over
the SINR threshold.
"""
import math

import numpy as np
from scipy import integrate, special


def selected_pdf(x, K, m, b):
    # K F^{K-1} f for the maximum of K i.i.d. gamma variates
    pdf = math.exp(m * math.log(b) + (m - 1) * math.log(x) - b * x - math.lgamma(m))
    return K * special.gammainc(m, b * x) ** (K - 1) * pdf


def user_sf(u, m, b):
    return special.gammaincc(m, b * u)


def success_probability(p, lower, lines, m_y, b_y):
    """Pr{X > lower, Y > max_i (lam_i / X + omega_i)} by direct quadrature."""
    def f(x):
        thr = max(lam / x + om for lam, om in lines)
        return selected_pdf(x, p.K, p.m_sr, p.rate_sr) * user_sf(thr, m_y, b_y)

    hi = lower + 200.0 / p.rate_sr
    pts = [lower]
    if len(lines) == 2:
        (l1, o1), (l2, o2) = lines
        if o1 != o2 and lower < (l2 - l1) / (o1 - o2) < hi:
            pts.append((l2 - l1) / (o1 - o2))
    pts.append(hi)
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-11, limit=400)[0]
    return total


def outage_u1(p):
    """Imperfect-CSI U1 outage straight from the SINR definitions."""
    g1 = 2 ** (2 * p.r1 / (1 - p.alpha)) - 1
    g2 = 2 ** (2 * p.r2 / (1 - p.alpha)) - 1
    if g2 >= p.a2 / p.a1 or (p.beta > 0 and g1 >= p.a1 / (p.beta * p.a2)):
        return 1.0
    eh = 2 * p.rho * p.mu * p.alpha / (1 - p.alpha)
    res = p.a1 + p.beta * p.a2
    # relay needs X above both decoding thresholds; U1 needs Y above two curves
    x_lo = max(g2 * (p.sigma_e2 + 1 / p.rho) / (p.a2 - p.a1 * g2),
               g1 * (p.sigma_e2 * res + 1 / p.rho) / (p.a1 - p.beta * p.a2 * g1))
    lines = [(g2 / ((p.a2 - p.a1 * g2) * eh), g2 * p.sigma_e2 / (p.a2 - p.a1 * g2)),
             (g1 / ((p.a1 - p.beta * p.a2 * g1) * eh), g1 * res * p.sigma_e2 / (p.a1 - p.beta * p.a2 * g1))]
    return 1 - success_probability(p, x_lo, lines, p.m_r1, p.rate_r1)


def outage_u2(p):
    g2 = 2 ** (2 * p.r2 / (1 - p.alpha)) - 1
    if g2 >= p.a2 / p.a1:
        return 1.0
    eh = 2 * p.rho * p.mu * p.alpha / (1 - p.alpha)
    d = p.a2 - p.a1 * g2
    lines = [(g2 / (d * eh), g2 * p.sigma_e2 / d)]
    return 1 - success_probability(p, g2 * (p.sigma_e2 + 1 / p.rho) / d, lines, p.m_r2, p.rate_r2)


def mc_sinr_samples(p, n, seed=0):
    """Plain numpy draws of the five SINRs, written without the package."""
    rng = np.random.default_rng(seed)
    lh = lambda lam: lam - p.sigma_e2
    x = rng.gamma(p.m_sr, lh(p.lambda_sr) / p.m_sr, size=(p.K, n)).max(axis=0)
    y1 = rng.gamma(p.m_r1, lh(p.lambda_r1) / p.m_r1, size=n)
    y2 = rng.gamma(p.m_r2, lh(p.lambda_r2) / p.m_r2, size=n)
    pr = 2 * p.rho * p.mu * p.alpha / (1 - p.alpha) * x
    res = p.a1 + p.beta * p.a2
    return dict(
        r2=x * p.rho * p.a2 / (x * p.rho * p.a1 + p.rho * p.sigma_e2 + 1),
        r1=x * p.rho * p.a1 / (x * p.rho * p.beta * p.a2 + p.rho * p.sigma_e2 * res + 1),
        u12=y1 * pr * p.a2 / (y1 * pr * p.a1 + pr * p.sigma_e2 + 1),
        u11=y1 * pr * p.a1 / (y1 * pr * p.beta * p.a2 + pr * p.sigma_e2 * res + 1),
        u22=y2 * pr * p.a2 / (y2 * pr * p.a1 + pr * p.sigma_e2 + 1),
    )
