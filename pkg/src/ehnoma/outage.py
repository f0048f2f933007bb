"""Closed-form and asymptotic outage probabilities.

Every exact expression has the form

    P_success = Pr{ X > lower,  Y > max_i (lam_i / X + omega_i) }

with X the PRS-selected source-relay gain and Y a relay-user gain.  The
user-side survival function is a finite sum, the PRS density a finite sum
of gamma kernels (see ``prs``), and each resulting integral

    int_a^b x^{s-1} exp(-c x - d / x) dx

is evaluated by expanding exp(-d/x) in a Taylor series and integrating
termwise into upper incomplete gamma functions.  Orders s - l go negative
for large l; those terms use Gamma(s-l, x) with x > 0.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from .prs import DensityTerm, gamma_cdf, gamma_survival, prs_density_terms
from .specfun import log_upper_incomplete_gamma
from .sysconfig import DerivedThresholds, SystemParams, derive_thresholds

log = logging.getLogger(__name__)

TAIL_RTOL = 1e-8  # required |last term| / |partial sum|
MAX_TAYLOR = 400
# Largest term / result before cancellation costs more than ~6 digits;
# past this the kernel integral is done by quadrature instead.
CANCELLATION_LIMIT = 1e8
CLAMP_SLACK = 0.02
# d/a beyond which the series is skipped: exp(2 d/a) would exceed CANCELLATION_LIMIT
QUAD_SWITCH = 0.5 * math.log(CANCELLATION_LIMIT)
# beyond lower + DENSITY_HORIZON / rate_sr the relay-gain density is below e^-1000
DENSITY_HORIZON = 1000.0


class SeriesTruncationWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class SelectionConstants:
    beta_hat_sr: float
    beta_hat_r1: float
    beta_hat_r2: float
    density: tuple[DensityTerm, ...]

    @property
    def n_correction_terms(self) -> int:
        """Kernels coming from the k >= 1 part of the PRS expansion."""
        b = self.beta_hat_sr
        return sum(1 for t in self.density if t.rate > b * 1.0000001)


def selection_constants(params: SystemParams) -> SelectionConstants:
    p = params
    if min(p.lambda_hat_sr, p.lambda_hat_r1, p.lambda_hat_r2) <= 0:
        raise ValueError("estimated channel variances must be positive")
    return SelectionConstants(
        beta_hat_sr=p.rate_sr,
        beta_hat_r1=p.rate_r1,
        beta_hat_r2=p.rate_r2,
        density=prs_density_terms(p.K, p.m_sr, p.rate_sr),
    )


# ---------------------------------------------------------------------------
# kernel integral
# ---------------------------------------------------------------------------

def _kernel_quad(s, c, d, a, b):
    f = lambda x: math.exp((s - 1) * math.log(x) - c * x - d / x) if x > 0 else 0.0
    # split at the mode so quad sees the peak even when it sits far from a
    disc = (s - 1) ** 2 + 4.0 * c * d
    mode = max(a, ((s - 1) + math.sqrt(disc)) / (2.0 * c)) if disc > 0 else a
    # the integrand is ~e^-60 of its peak at `cut`; what remains is taken
    # with e^{-d/x} ~ 1 as an incomplete gamma difference
    cut = mode + 60.0 * (1.0 + abs(s)) / c
    pts = [a] + ([mode] if a < mode < min(b, cut) else []) + [min(b, cut)]
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        total += integrate.quad(f, lo, hi, epsabs=0, epsrel=1e-11, limit=400)[0]
    if b > cut:
        tail = math.exp(log_upper_incomplete_gamma(float(s), c * cut) - s * math.log(c))
        if math.isfinite(b):
            tail -= math.exp(log_upper_incomplete_gamma(float(s), c * b) - s * math.log(c))
        total += tail
    return total


def kernel_integral(s: int, c: float, d: float, a: float, b: float = math.inf,
                    n_taylor: int = 25) -> float:
    """int_a^b x^{s-1} e^{-c x - d/x} dx for a > 0, via Taylor + incomplete gamma.

    The series is taken to at least ``n_taylor`` terms and extended until the
    last term is below TAIL_RTOL of the partial sum.
    """
    if not a > 0:
        raise ValueError("lower limit must be positive")
    if b <= a:
        return 0.0
    if d / a > QUAD_SWITCH:
        # the alternating series would lose ~2 d/a nats to cancellation
        return _kernel_quad(s, c, d, a, b)
    try:
        return _kernel_series(s, c, d, a, b, n_taylor)
    except (OverflowError, _SeriesFailure):
        return _kernel_quad(s, c, d, a, b)


class _SeriesFailure(ArithmeticError):
    pass


def _kernel_series(s, c, d, a, b, n_taylor):
    log_c = math.log(c)
    log_d = math.log(d) if d > 0 else -math.inf
    total = 0.0
    biggest = 0.0
    l = 0
    last = 0.0
    while True:
        order = s - l
        log_pref = (l * log_d if l else 0.0) - math.lgamma(l + 1) - order * log_c
        upper = math.exp(log_pref + log_upper_incomplete_gamma(float(order), c * a))
        if math.isfinite(b):
            upper -= math.exp(log_pref + log_upper_incomplete_gamma(float(order), c * b))
        term = -upper if l % 2 else upper
        total += term
        biggest = max(biggest, abs(term))
        last = abs(term)
        l += 1
        if d == 0:
            break
        if l > n_taylor and last <= TAIL_RTOL * abs(total):
            break
        if l > MAX_TAYLOR:
            warnings.warn(
                f"Taylor tail {last / abs(total):.2e} after {MAX_TAYLOR} terms; using quadrature",
                SeriesTruncationWarning, stacklevel=3)
            raise _SeriesFailure
    if total <= 0 or biggest > CANCELLATION_LIMIT * abs(total):
        raise _SeriesFailure
    return total


# ---------------------------------------------------------------------------
# joint survival  Pr{X > lower, Y > max_i(lam_i / X + omega_i)}
# ---------------------------------------------------------------------------

def _segment(lines, lo, hi):
    """Pick the dominating user-side threshold line on (lo, hi)."""
    probe = 0.5 * (lo + hi) if math.isfinite(hi) else 2.0 * lo + 1.0
    return max(lines, key=lambda ln: ln[0] / probe + ln[1])


def _breakpoints(lines, lower, horizon=math.inf):
    # a crossing past `horizon` sits where the relay-gain density has
    # underflowed; splitting there would only choose the wrong line below it
    pts = [lower]
    if len(lines) == 2:
        (l1, o1), (l2, o2) = lines
        if o1 != o2:
            x = (l2 - l1) / (o1 - o2)
            if lower < x < horizon:
                pts.append(x)
    pts.append(math.inf)
    return pts


def _survival_on_segment(density, lo, hi, lam, omega, m_y, b_y, n_taylor):
    # S_Y(lam/x + omega) = e^{-b omega} e^{-b lam / x} sum_n (b/x)^n (lam + omega x)^n / n!
    total = 0.0
    pref = math.exp(-b_y * omega)
    d = b_y * lam
    cache = {}
    for n in range(m_y):
        for j in range(n + 1):
            coef = pref * b_y**n / math.factorial(n) * math.comb(n, j) * lam**j
            if n - j:
                coef *= omega ** (n - j)
            if coef == 0.0:
                continue
            for t in density:
                key = (t.shape - j, t.rate)
                if key not in cache:
                    cache[key] = kernel_integral(t.shape - j, t.rate, d, lo, hi, n_taylor)
                total += coef * t.weight * cache[key]
    return total


def joint_survival(params: SystemParams, lower: float, lines, m_y: int, b_y: float,
                   n_taylor: int | None = None) -> float:
    """Pr{X > lower, Y > max over lines of (lam/X + omega)} in closed form.

    ``lines`` holds one or two (lam, omega) pairs with lam > 0, omega >= 0.
    """
    n_taylor = params.n_taylor if n_taylor is None else n_taylor
    density = prs_density_terms(params.K, params.m_sr, params.rate_sr)
    pts = _breakpoints(lines, lower, lower + DENSITY_HORIZON / params.rate_sr)
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        lam, omega = _segment(lines, lo, hi)
        total += _survival_on_segment(density, lo, hi, lam, omega, m_y, b_y, n_taylor)
    return total


def _clamp(value: float, what: str) -> float:
    if value < -CLAMP_SLACK or value > 1 + CLAMP_SLACK:
        log.warning("%s = %.6g lies outside [0, 1] by more than %.2g: series defect",
                    what, value, CLAMP_SLACK)
    elif value < 0 or value > 1:
        log.debug("%s = %.3g clamped to [0, 1]", what, value)
    return float(min(1.0, max(0.0, value)))


def _th(params, th):
    return derive_thresholds(params) if th is None else th


# ---------------------------------------------------------------------------
# exact outage expressions
# ---------------------------------------------------------------------------

def outage_u1_icsi(params: SystemParams, th: DerivedThresholds | None = None) -> float:
    """U1 outage under imperfect CSI and imperfect SIC."""
    th = _th(params, th)
    if not th.feasible_u1:
        return 1.0
    lines = [(th.lambda1, th.Omega1), (th.lambda2, th.Omega2)]
    success = joint_survival(params, th.psi, lines, params.m_r1, params.rate_r1)
    return _clamp(1.0 - success, "P_out,1")


def outage_u2_icsi(params: SystemParams, th: DerivedThresholds | None = None) -> float:
    """U2 outage under imperfect CSI."""
    th = _th(params, th)
    if not th.feasible_u2:
        return 1.0
    success = joint_survival(params, th.Delta1, [(th.lambda1, th.Omega1)],
                             params.m_r2, params.rate_r2)
    return _clamp(1.0 - success, "P_out,2")


def outage_u1_perfect(params: SystemParams, th: DerivedThresholds | None = None) -> float:
    """U1 outage with perfect CSI and SIC (sigma_e2 and beta are ignored)."""
    params = params.perfect()
    th = derive_thresholds(params) if th is None else th
    if not th.feasible_u2:
        return 1.0
    success = joint_survival(params, th.Delta3, [(th.Delta2, 0.0)],
                             params.m_r1, params.rate_r1)
    return _clamp(1.0 - success, "P_out,1 (perfect)")


def outage_u2_perfect(params: SystemParams, th: DerivedThresholds | None = None) -> float:
    """U2 outage with perfect CSI."""
    params = params.perfect()
    th = derive_thresholds(params) if th is None else th
    if not th.feasible_u2:
        return 1.0
    success = joint_survival(params, th.Delta1, [(th.lambda1, 0.0)],
                             params.m_r2, params.rate_r2)
    return _clamp(1.0 - success, "P_out,2 (perfect)")


def outage(params: SystemParams, user: int, csi: str = "imperfect") -> float:
    fn = {
        (1, "imperfect"): outage_u1_icsi, (2, "imperfect"): outage_u2_icsi,
        (1, "perfect"): outage_u1_perfect, (2, "perfect"): outage_u2_perfect,
    }[(user, csi)]
    return fn(params)


# ---------------------------------------------------------------------------
# high-SNR asymptotics
# ---------------------------------------------------------------------------

def _small_cdf(x, m, b):
    """Leading term of the gamma CDF near zero: (b x)^m / m!."""
    return (b * x) ** m / math.factorial(m)


def _asy_imperfect(params, lower_inf, a, m_y, b_y):
    # Pr{X > lower} with the small-argument CDF for each of the K relays,
    # times the exact user-link survival at the 1/rho -> 0 threshold.
    fx = _small_cdf(lower_inf, params.m_sr, params.rate_sr) ** params.K
    return 1.0 - (1.0 - fx) * float(gamma_survival(a, m_y, b_y))


def _asy_perfect(params, lower, delta, m_y, b_y):
    # F_X(lower) + int_lower^inf F_Y(delta/x) f_X(x) dx, both CDFs replaced by
    # their leading small-argument terms except the PRS density.
    p = params
    first = _small_cdf(lower, p.m_sr, p.rate_sr) ** p.K
    scale = (b_y * delta) ** m_y / math.factorial(m_y)
    second = 0.0
    for t in prs_density_terms(p.K, p.m_sr, p.rate_sr):
        order = t.shape - m_y
        second += t.weight * t.rate ** (-order) * math.exp(
            log_upper_incomplete_gamma(float(order), t.rate * lower))
    return first + scale * second


def outage_asymptotic(params: SystemParams, th: DerivedThresholds | None, which: str) -> float:
    """High-SNR outage.  ``which`` is one of u1_icsi, u2_icsi, u1_perfect, u2_perfect.

    The imperfect-CSI forms are the rho -> infinity floors and do not depend
    on rho; the perfect-CSI forms decay polynomially in rho.
    """
    p = params
    if which in ("u1_icsi", "u2_icsi"):
        th = _th(p, th)
        if which == "u1_icsi":
            if not th.feasible_u1:
                return 1.0
            # 1/rho -> 0 in psi leaves max(Omega1, Omega2)
            a = max(th.Omega1, th.Omega2)
            return min(1.0, _asy_imperfect(p, a, a, p.m_r1, p.rate_r1))
        if not th.feasible_u2:
            return 1.0
        return min(1.0, _asy_imperfect(p, th.Omega1, th.Omega1, p.m_r2, p.rate_r2))
    if which in ("u1_perfect", "u2_perfect"):
        pp = p.perfect()
        th = derive_thresholds(pp) if th is None else th
        if not th.feasible_u2:
            return 1.0
        if which == "u1_perfect":
            return min(1.0, _asy_perfect(pp, th.Delta3, th.Delta2, pp.m_r1, pp.rate_r1))
        return min(1.0, _asy_perfect(pp, th.Delta1, th.lambda1, pp.m_r2, pp.rate_r2))
    raise ValueError(f"unknown asymptotic case {which!r}")


def throughput(params: SystemParams, csi: str = "imperfect") -> float:
    """Delay-limited throughput for fixed target rates r1, r2."""
    p = params
    if p.alpha <= 0 or p.alpha >= 1:
        return 0.0  # no harvested power, or no information time
    p1 = outage(p, 1, csi)
    p2 = outage(p, 2, csi)
    return float(0.5 * (1.0 - p.alpha) * ((1.0 - p1) * p.r1 + (1.0 - p2) * p.r2))
