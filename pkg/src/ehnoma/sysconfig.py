"""System parameters, validation and the derived threshold constants.

All powers are normalised by the noise variance, so the only power-like
parameter is the transmit SNR ``rho`` (linear).
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, fields
from pathlib import Path


class ConfigError(ValueError):
    """Invalid parameters.  ``violations`` lists every broken invariant."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class SystemParams:
    K: int = 2
    m_sr: int = 2
    m_r1: int = 2
    m_r2: int = 2
    lambda_sr: float = 1.0
    lambda_r1: float = 1.0
    lambda_r2: float = 0.5
    a1: float = 0.3
    a2: float = 0.7
    alpha: float = 0.35
    mu: float = 0.9
    rho: float = 100.0
    sigma_e2: float = 0.01
    beta: float = 0.15
    r1: float = 0.5
    r2: float = 0.5
    n_taylor: int = 25

    # -- convenience -------------------------------------------------------
    @property
    def rho_db(self) -> float:
        return 10.0 * math.log10(self.rho)

    def with_rho_db(self, rho_db: float) -> "SystemParams":
        return dataclasses.replace(self, rho=10.0 ** (rho_db / 10.0))

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def perfect(self) -> "SystemParams":
        """Same system with perfect CSI and perfect SIC."""
        return dataclasses.replace(self, sigma_e2=0.0, beta=0.0)

    @property
    def lambda_hat_sr(self) -> float:
        return self.lambda_sr - self.sigma_e2

    @property
    def lambda_hat_r1(self) -> float:
        return self.lambda_r1 - self.sigma_e2

    @property
    def lambda_hat_r2(self) -> float:
        return self.lambda_r2 - self.sigma_e2

    @property
    def rate_sr(self) -> float:
        """m / lambda_hat for the source-relay links."""
        return self.m_sr / self.lambda_hat_sr

    @property
    def rate_r1(self) -> float:
        return self.m_r1 / self.lambda_hat_r1

    @property
    def rate_r2(self) -> float:
        return self.m_r2 / self.lambda_hat_r2

    @property
    def eh_gain(self) -> float:
        """Relay SNR per unit source-relay gain: 2 rho mu alpha / (1 - alpha)."""
        return 2.0 * self.rho * self.mu * self.alpha / (1.0 - self.alpha)


PARAM_FIELDS = tuple(f.name for f in fields(SystemParams))
_INT_FIELDS = {"K", "m_sr", "m_r1", "m_r2", "n_taylor"}


def _violations(p: SystemParams) -> list[str]:
    v = []
    for name in _INT_FIELDS:
        value = getattr(p, name)
        if isinstance(value, bool) or not float(value).is_integer():
            v.append(f"{name}: must be an integer, got {value}")
    if p.K < 1:
        v.append(f"K: must be >= 1, got {p.K}")
    for name in ("m_sr", "m_r1", "m_r2"):
        if getattr(p, name) < 1:
            v.append(f"{name}: Nakagami shape must be a positive integer, got {getattr(p, name)}")
    for name in ("lambda_sr", "lambda_r1", "lambda_r2", "rho", "r1", "r2"):
        if not getattr(p, name) > 0:
            v.append(f"{name}: must be > 0, got {getattr(p, name)}")
    if not (p.a1 > 0 and p.a2 > 0):
        v.append(f"a1, a2: must both be > 0, got a1={p.a1}, a2={p.a2}")
    if abs(p.a1 + p.a2 - 1.0) > 1e-12:
        v.append(f"a1 + a2: must equal 1, got {p.a1 + p.a2}")
    if not p.a2 > p.a1:
        v.append(f"a2: weak user must get more power (a2 > a1), got a1={p.a1}, a2={p.a2}")
    if not 0 < p.alpha < 1:
        v.append(f"alpha: must lie in (0, 1), got {p.alpha}")
    if not 0 < p.mu <= 1:
        v.append(f"mu: must lie in (0, 1], got {p.mu}")
    if not 0 <= p.beta <= 1:
        v.append(f"beta: must lie in [0, 1], got {p.beta}")
    if p.sigma_e2 < 0:
        v.append(f"sigma_e2: must be >= 0, got {p.sigma_e2}")
    lam_min = min(p.lambda_sr, p.lambda_r1, p.lambda_r2)
    if p.sigma_e2 >= lam_min:
        v.append(f"sigma_e2: must be < min(lambda) = {lam_min} so estimated variances stay positive, got {p.sigma_e2}")
    if p.n_taylor < 2:
        v.append(f"n_taylor: must be >= 2, got {p.n_taylor}")
    return v


def validate(params: SystemParams) -> SystemParams:
    """Return ``params`` unchanged, or raise ConfigError listing every violation."""
    problems = _violations(params)
    if problems:
        raise ConfigError(problems)
    return params


@dataclass(frozen=True)
class DerivedThresholds:
    """SINR thresholds and the auxiliary constants of the outage analysis.

    Constants that only make sense for a feasible user are NaN when the
    corresponding flag is False; downstream code pins that user's outage
    to 1 in that case.
    """
    gamma_th1: float
    gamma_th2: float
    lambda1: float
    lambda2: float
    Omega1: float
    Omega2: float
    Delta1: float
    psi: float
    gamma_lower: float
    feasible_u1: bool
    feasible_u2: bool
    # perfect-CSI/SIC constants
    Delta2: float = field(default=math.nan)
    Delta3: float = field(default=math.nan)

    @property
    def split(self) -> float:
        """Crossing point of the two user-side threshold curves, inf if none."""
        d_omega = self.Omega1 - self.Omega2
        d_lambda = self.lambda2 - self.lambda1
        if d_omega == 0 or d_lambda / d_omega <= 0:
            return math.inf
        return d_lambda / d_omega


def sinr_threshold(rate: float, alpha: float) -> float:
    """2^{2r/(1-alpha)} - 1: two-hop half-duplex over a (1-alpha) fraction."""
    return 2.0 ** (2.0 * rate / (1.0 - alpha)) - 1.0


def derive_thresholds(params: SystemParams) -> DerivedThresholds:
    p = params
    g1 = sinr_threshold(p.r1, p.alpha)
    g2 = sinr_threshold(p.r2, p.alpha)
    nan = math.nan
    feasible_u2 = g2 < p.a2 / p.a1
    sic_ok = p.beta == 0 or g1 < p.a1 / (p.beta * p.a2)
    feasible_u1 = feasible_u2 and sic_ok
    eh = 2.0 * p.alpha * p.mu * p.rho / (1.0 - p.alpha)  # P_r per unit |h_sr|^2

    if feasible_u2:
        d2 = p.a2 - p.a1 * g2
        lambda1 = g2 / (d2 * eh)
        Omega1 = g2 * p.sigma_e2 / d2
        Delta1 = g2 * (p.sigma_e2 + 1.0 / p.rho) / d2
    else:
        lambda1 = Omega1 = Delta1 = nan

    if feasible_u1:
        d1 = p.a1 - p.a2 * p.beta * g1
        lambda2 = g1 / (d1 * eh)
        Omega2 = g1 * (p.a1 + p.a2 * p.beta) * p.sigma_e2 / d1
        psi = max(Delta1, g1 * (p.sigma_e2 * (p.a1 + p.a2 * p.beta) + 1.0 / p.rho) / d1)
    else:
        lambda2 = Omega2 = psi = nan

    th = DerivedThresholds(
        gamma_th1=g1, gamma_th2=g2, lambda1=lambda1, lambda2=lambda2,
        Omega1=Omega1, Omega2=Omega2, Delta1=Delta1, psi=psi,
        gamma_lower=nan, feasible_u1=feasible_u1, feasible_u2=feasible_u2,
    )
    if feasible_u1:
        th = dataclasses.replace(th, gamma_lower=max(psi, th.split) if math.isfinite(th.split) else psi)
    if feasible_u2:
        delta3 = max(g2 / ((p.a2 - p.a1 * g2) * p.rho), g1 / (p.a1 * p.rho))
        delta2 = max(g2 / ((p.a2 - p.a1 * g2) * eh), g1 / (p.a1 * eh))
        th = dataclasses.replace(th, Delta2=delta2, Delta3=delta3)
    return th


# ---------------------------------------------------------------------------
# key = value config files
# ---------------------------------------------------------------------------

EXTRA_CONFIG_KEYS = ("seed", "n_trials")


def _coerce(name: str, text: str):
    if name in _INT_FIELDS or name in EXTRA_CONFIG_KEYS:
        value = float(text)
        if not value.is_integer():
            raise ValueError(f"{name} must be an integer")
        return int(value)
    return float(text)


def parse_config(text: str) -> tuple[dict, dict]:
    """Parse ``key = value`` lines.  Returns (param overrides, extra settings)."""
    overrides, extra, errors = {}, {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in PARAM_FIELDS and key not in EXTRA_CONFIG_KEYS:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        try:
            parsed = _coerce(key, value)
        except ValueError:
            errors.append(f"line {lineno}: bad value for {key}: {value!r}")
            continue
        (overrides if key in PARAM_FIELDS else extra)[key] = parsed
    if errors:
        raise ConfigError(errors)
    return overrides, extra


def load_config(path: str | Path | None, **cli_overrides) -> tuple[SystemParams, dict]:
    """Defaults <- config file <- CLI overrides, validated."""
    overrides, extra = ({}, {})
    if path is not None:
        overrides, extra = parse_config(Path(path).read_text())
    for key, value in cli_overrides.items():
        if value is None:
            continue
        (overrides if key in PARAM_FIELDS else extra)[key] = value
    params = validate(SystemParams(**overrides))
    return params, extra
