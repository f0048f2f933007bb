import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from ehnoma.sysconfig import (
    ConfigError, SystemParams, derive_thresholds, load_config, parse_config, sinr_threshold, validate,
)


def test_defaults_are_valid(defaults):
    assert validate(defaults) is defaults


def test_power_order_enforced():
    with pytest.raises(ConfigError) as err:
        validate(SystemParams(a1=0.6, a2=0.4))
    assert any("a2" in v for v in err.value.violations)


def test_estimated_variance_must_stay_positive():
    with pytest.raises(ConfigError) as err:
        validate(SystemParams(sigma_e2=0.6, lambda_r2=0.5))
    assert any("sigma_e2" in v for v in err.value.violations)


def test_all_violations_reported():
    with pytest.raises(ConfigError) as err:
        validate(SystemParams(K=0, alpha=1.2, beta=-0.1, n_taylor=1, a1=0.5, a2=0.6))
    joined = " ".join(err.value.violations)
    for name in ("K", "alpha", "beta", "n_taylor", "a1 + a2"):
        assert name in joined


def test_threshold_value():
    assert sinr_threshold(0.5, 0.35) == pytest.approx(2 ** (1 / 0.65) - 1, rel=1e-15)
    ref = float(mpmath.mpf(2) ** (mpmath.mpf(1) / mpmath.mpf("0.65")) - 1)
    assert sinr_threshold(0.5, 0.35) == pytest.approx(ref, rel=1e-14)
    assert sinr_threshold(0.5, 0.35) == pytest.approx(1.905, abs=1e-3)


def test_default_feasibility(defaults):
    th = derive_thresholds(defaults)
    assert th.feasible_u2 and th.feasible_u1
    assert th.gamma_th2 < defaults.a2 / defaults.a1


def test_perfect_sic_is_always_sic_feasible():
    th = derive_thresholds(SystemParams(beta=0.0))
    assert th.feasible_u1
    assert math.isfinite(th.Omega2)


def test_infeasible_u2_flags_and_nans():
    th = derive_thresholds(SystemParams(r2=1.5))
    assert not th.feasible_u2 and not th.feasible_u1
    assert math.isnan(th.lambda1) and math.isnan(th.psi)


def test_constants_by_hand(defaults):
    p, th = defaults, derive_thresholds(defaults)
    g = th.gamma_th1
    eh = 2 * p.rho * p.mu * p.alpha / (1 - p.alpha)
    assert th.lambda1 == pytest.approx(g / ((p.a2 - p.a1 * g) * eh))
    assert th.Omega1 == pytest.approx(g * p.sigma_e2 / (p.a2 - p.a1 * g))
    d1 = p.a1 - p.beta * p.a2 * g
    assert th.lambda2 == pytest.approx(g / (d1 * eh))
    assert th.Omega2 == pytest.approx(g * (p.a1 + p.beta * p.a2) * p.sigma_e2 / d1)
    assert th.psi == pytest.approx(max(th.Delta1, g * (p.sigma_e2 * (p.a1 + p.beta * p.a2) + 1 / p.rho) / d1))


@given(st.floats(0.05, 0.9), st.floats(0.001, 0.05))
def test_thresholds_increase_with_alpha(alpha, step):
    a = derive_thresholds(SystemParams(alpha=alpha))
    b = derive_thresholds(SystemParams(alpha=min(alpha + step, 0.99)))
    assert b.gamma_th1 > a.gamma_th1 and b.gamma_th2 > a.gamma_th2


def test_perfect_limit_constants():
    p = SystemParams(sigma_e2=0.0, beta=0.0)
    th = derive_thresholds(p)
    assert th.Omega1 == 0.0 and th.Omega2 == 0.0
    assert th.Delta1 == pytest.approx(th.gamma_th2 / ((p.a2 - p.a1 * th.gamma_th2) * p.rho))
    assert th.Delta1 <= th.Delta3


def test_rho_db_round_trip(defaults):
    assert defaults.with_rho_db(20.0).rho == pytest.approx(100.0)
    assert defaults.with_rho_db(13.0).rho_db == pytest.approx(13.0)


def test_parse_config(tmp_path):
    text = "# comment\nK = 5\nrho = 1000  # linear\nseed=7\n\nn_trials = 1e5\n"
    over, extra = parse_config(text)
    assert over == {"K": 5, "rho": 1000.0}
    assert extra == {"seed": 7, "n_trials": 100000}
    path = tmp_path / "c.cfg"
    path.write_text(text)
    params, extra = load_config(path, seed=9)
    assert params.K == 5 and extra["seed"] == 9


@pytest.mark.parametrize("text", ["bogus = 1", "K = 2.5", "K 2", "rho = abc"])
def test_parse_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_load_config_validates(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("a1 = 0.8\na2 = 0.2\n")
    with pytest.raises(ConfigError):
        load_config(path)
