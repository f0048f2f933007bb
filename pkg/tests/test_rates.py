import math

import numpy as np
import pytest

import oracles
from ehnoma.montecarlo import McConfig, mc_rates
from ehnoma.rates import (
    DegenerateVariableError, RateCdfParams, _shifted_product_cdf_quad, cdf_p, cdf_q, ergodic_rate,
    ergodic_rate_perfect, ergodic_rate_u1_icsi, ergodic_rate_u2_icsi, min_sinr_survival,
    shifted_product_cdf, sum_rate,
)
from ehnoma.sysconfig import SystemParams


def _pq_samples(p, user, n=1_000_000, seed=0):
    rng = np.random.default_rng(seed)
    c = RateCdfParams.for_user(p, user)
    x = rng.gamma(p.m_sr, 1 / p.rate_sr, size=(p.K, n)).max(axis=0)
    y = rng.gamma(c.m_y, 1 / c.b_y, size=n)
    return c.scale_p * x * (y + c.shift_p), c.scale_q * x * (y + c.shift_q)


@pytest.mark.parametrize("user", [1, 2])
def test_pq_cdfs_against_empirical_medians(defaults, user):
    P, Q = _pq_samples(defaults, user)
    assert cdf_p(defaults, float(np.median(P)), user) == pytest.approx(0.5, abs=0.01)
    assert cdf_q(defaults, float(np.median(Q)), user) == pytest.approx(0.5, abs=0.01)


@pytest.mark.parametrize("user", [1, 2])
def test_pq_cdf_limits_and_monotonicity(defaults, user):
    P, Q = _pq_samples(defaults, user, n=200_000)
    for fn, sample in ((cdf_p, P), (cdf_q, Q)):
        assert fn(defaults, 0.0, user) == 0.0
        zs = np.linspace(0, np.quantile(sample, 0.999), 50)
        vals = [fn(defaults, z, user) for z in zs]
        assert np.all(np.diff(vals) >= -1e-12)
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert fn(defaults, float(np.quantile(sample, 0.99999)) * 1.5, user) >= 0.9999


@pytest.mark.parametrize("params", [SystemParams(), SystemParams(beta=1e-3), SystemParams(beta=0.02),
                                    SystemParams(K=5, m_sr=3, m_r1=3, m_r2=3)])
def test_pq_cdfs_monotone_on_log_grid(params):
    zs = np.geomspace(1e-5, 1e6, 120)
    for user in (1, 2):
        for fn in (cdf_p, cdf_q):
            v = np.array([fn(params, z, user) for z in zs])
            assert np.all(np.diff(v) >= -1e-12)
            assert v[-1] >= 0.9999


def test_closed_form_and_quadrature_cdfs_agree(defaults):
    for user in (1, 2):
        c = RateCdfParams.for_user(defaults, user)
        for z in (1e-2, 0.3, 3.0, 30.0):
            closed = shifted_product_cdf(z, c.scale_q, c.shift_q, defaults, c.m_y, c.b_y)
            quad = _shifted_product_cdf_quad(z / c.scale_q, c.shift_q, defaults, c.m_y, c.b_y)
            assert closed == pytest.approx(quad, rel=1e-5, abs=1e-12)


def test_q_is_degenerate_without_sic_residual():
    with pytest.raises(DegenerateVariableError):
        cdf_q(SystemParams(beta=0.0), 1.0)
    # the rate itself is still defined on that path
    p = SystemParams(beta=0.0)
    assert 0 < ergodic_rate_u1_icsi(p, method="destination") < 10


@pytest.mark.parametrize("method", ["exact", "destination"])
def test_vanishing_snr(method):
    p = SystemParams(rho=1e-6)
    assert ergodic_rate_u1_icsi(p, method) < 1e-3
    assert ergodic_rate_u2_icsi(p, method) < 1e-3


@pytest.mark.parametrize("rho_db", [0, 10, 20, 30])
@pytest.mark.parametrize("csi", ["imperfect", "perfect"])
def test_rates_match_monte_carlo(rho_db, csi):
    p = SystemParams().with_rho_db(rho_db)
    cfg = McConfig(n_trials=1_000_000, seed=10 + rho_db)
    r1, r2 = mc_rates(p, cfg, csi)
    for user, est in ((1, r1), (2, r2)):
        tol = max(0.02, 3 * est.half_width / cfg.z)
        assert abs(ergodic_rate(p, user, csi) - est.mean) <= tol


def test_exact_rate_against_numpy_sampler(defaults):
    s = oracles.mc_sinr_samples(defaults, 1_000_000, seed=42)
    pre = (1 - defaults.alpha) / 2
    r1 = pre * np.log2(1 + np.minimum(s["r1"], s["u11"]))
    se = r1.std() / math.sqrt(r1.size)
    assert abs(ergodic_rate_u1_icsi(defaults) - r1.mean()) < 4 * se + 1e-4


def test_min_sinr_survival_against_samples(defaults):
    s = oracles.mc_sinr_samples(defaults, 400_000, seed=7)
    for g in (0.5, 2.0, 5.0):
        emp = np.mean(np.minimum(s["r1"], s["u11"]) > g)
        assert min_sinr_survival(defaults, 1, g) == pytest.approx(emp, abs=0.004)
        emp = np.mean(np.minimum(s["r2"], s["u22"]) > g)
        assert min_sinr_survival(defaults, 2, g) == pytest.approx(emp, abs=0.004)


def test_destination_form_is_an_upper_bound():
    for rho_db in (10, 20, 30):
        p = SystemParams().with_rho_db(rho_db)
        for user in (1, 2):
            for csi in ("imperfect", "perfect"):
                assert ergodic_rate(p, user, csi, "destination") >= ergodic_rate(p, user, csi) - 1e-6


def test_destination_form_close_to_mc_at_20db(defaults):
    cfg = McConfig(n_trials=1_000_000, seed=5)
    r1, r2 = mc_rates(defaults, cfg)
    assert abs(ergodic_rate_u1_icsi(defaults, "destination") - r1.mean) <= max(0.02, 3 * r1.half_width / cfg.z)
    assert abs(ergodic_rate_u2_icsi(defaults, "destination") - r2.mean) <= max(0.02, 3 * r2.half_width / cfg.z)


def test_imperfect_rates_saturate():
    for user in (1, 2):
        a = ergodic_rate(SystemParams().with_rho_db(40), user)
        b = ergodic_rate(SystemParams().with_rho_db(50), user)
        assert a == pytest.approx(b, rel=0.02)


def test_perfect_u1_grows_linearly_in_db():
    r = [ergodic_rate_perfect(SystemParams().with_rho_db(d), 1) for d in (20, 30, 40)]
    assert r[2] - r[1] == pytest.approx(r[1] - r[0], rel=0.15)


def test_perfect_u2_ceiling():
    p = SystemParams().with_rho_db(50)
    ceiling = (1 - p.alpha) / 2 * math.log2(1 + p.a2 / p.a1)
    assert ergodic_rate_perfect(p, 2) == pytest.approx(ceiling, rel=0.02)
    assert ergodic_rate_perfect(p, 2) < ceiling


def test_near_perfect_matches_perfect():
    for rho_db in (0, 20, 40):
        p = SystemParams(sigma_e2=1e-12, beta=1e-12).with_rho_db(rho_db)
        assert ergodic_rate_u1_icsi(p) == pytest.approx(ergodic_rate_perfect(p, 1), abs=1e-3)
        assert ergodic_rate_u2_icsi(p) == pytest.approx(ergodic_rate_perfect(p, 2), abs=1e-3)


@pytest.mark.parametrize("csi", ["imperfect", "perfect"])
def test_rates_nonnegative_and_nondecreasing(csi):
    grid = np.arange(-10, 45, 5.0)
    for user in (1, 2):
        vals = [ergodic_rate(SystemParams().with_rho_db(d), user, csi) for d in grid]
        assert min(vals) >= 0
        assert np.all(np.diff(vals) >= -1e-9)


def test_sum_rate_and_bad_arguments(defaults):
    assert sum_rate(defaults) == pytest.approx(ergodic_rate(defaults, 1) + ergodic_rate(defaults, 2))
    with pytest.raises(ValueError):
        ergodic_rate(defaults, 3)
    with pytest.raises(ValueError):
        ergodic_rate(defaults, 1, method="meijer")
    with pytest.raises(ValueError):
        ergodic_rate(defaults, 1, csi="partial")
