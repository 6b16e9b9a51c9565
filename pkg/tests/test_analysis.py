import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leosd.analysis import (AnalysisConfig, asymptotic_pest, bler_bound, complexity_leosd, complexity_osd,
                            error_count_pmf, error_count_pmf_all, expected_estimates, expected_teps,
                            expected_teps_by_weight, full_rank_prob, integrate, m_of_rho,
                            ordered_reliability_pdf, osd_ml_order, p_est_bound, reliability_cdf,
                            reliability_pdf)
from leosd.channel import n0_from_snr_db, transmit
from leosd.gf2_core import rank
from leosd.leosd import LeosdParams, preprocess

N0_2DB = n0_from_snr_db(2.0)

# Frozen from an independent adaptive-quadrature evaluation (scipy.integrate.quad on
# the direct order-statistic density, written without this package).
QUAD_VALUES = [
    (31, 64, 0, N0_2DB, 0.621484599528349),
    (31, 64, 1, N0_2DB, 0.2917452836753187),
    (31, 64, 2, N0_2DB, 0.07228937532009905),
    (35, 64, 0, N0_2DB, 0.7312039605987357),
    (10, 16, 1, 1.0, 0.032115760584920404),
    (2, 8, 3, 0.5, 4.375175775384704e-05),
    (44, 128, 5, 2.0, 0.16399614311030464),
]


@pytest.mark.parametrize("n0", [0.3, 1.0, N0_2DB, 4.0])
def test_density_normalisation(n0):
    assert integrate(lambda a: reliability_pdf(a, n0), n0) == pytest.approx(1.0, abs=1e-9)
    for i, n in [(1, 8), (5, 16), (31, 64), (64, 64), (50, 128)]:
        assert integrate(lambda a: ordered_reliability_pdf(i, n, a, n0), n0) == pytest.approx(1.0, abs=1e-6)
    x = np.linspace(0, 5, 7)
    assert reliability_cdf(1e3, n0) == pytest.approx(1.0)
    assert np.all(np.diff(reliability_cdf(x, n0)) >= 0)


def test_quadrature_converges():
    a = error_count_pmf_all(31, 64, N0_2DB, AnalysisConfig(nodes=1024))
    b = error_count_pmf_all(31, 64, N0_2DB, AnalysisConfig(nodes=2048))
    assert np.max(np.abs(a - b)) < 1e-7
    assert b.sum() == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("a,n,j,n0,expect", QUAD_VALUES)
def test_pmf_against_independent_quadrature(a, n, j, n0, expect):
    assert error_count_pmf(a, n, j, n0) == pytest.approx(expect, rel=1e-6, abs=1e-12)


def simulated_counts(a, n, n0, frames, seed):
    rng = np.random.default_rng(seed)
    g = 1.0 + rng.normal(0, math.sqrt(n0 / 2), (frames, n))
    order = np.argsort(np.abs(g), axis=1, kind="stable")
    wrong = np.take_along_axis(g < 0, order, axis=1)
    return wrong[:, a - 1:].sum(axis=1)


@pytest.mark.parametrize("a,n,snr", [(31, 64, 2.0), (17, 32, 0.0), (86, 128, 4.0)])
def test_pmf_against_monte_carlo(a, n, snr):
    n0 = n0_from_snr_db(snr)
    counts = simulated_counts(a, n, n0, 40000, seed=a)
    pmf = error_count_pmf_all(a, n, n0)
    for j in range(3):
        freq = np.mean(counts == j)
        sd = math.sqrt(pmf[j] * (1 - pmf[j]) / counts.size)
        assert abs(freq - pmf[j]) < 3 * sd + 1e-9


def test_pmf_rejects_first_position():
    with pytest.raises(ValueError):
        error_count_pmf_all(1, 8, 1.0)
    with pytest.raises(ValueError):
        error_count_pmf(4, 8, 6, 1.0)


def test_full_rank_probability():
    assert full_rank_prob(64, 32) == pytest.approx(0.28879, abs=1e-5)
    assert full_rank_prob(64, 30) == full_rank_prob(64, 34)
    hits = sum(rank(np.array(bits, dtype=np.uint8).reshape(2, 3)) == 2 for bits in product((0, 1), repeat=6))
    assert hits == 42 and full_rank_prob(5, 2) == pytest.approx(42 / 64)


def test_expected_counts_known_values():
    assert expected_teps(LeosdParams(3, 3, 3), 64, 30) == pytest.approx(411.25)
    mu = expected_teps(LeosdParams(5, 12, 12), 64, 16)
    assert mu == pytest.approx(20.5745131673757, rel=1e-12)  # tabulated as 20
    assert expected_teps(LeosdParams(2, 2, 3), 128, 85) == 947
    assert expected_estimates(LeosdParams(2, 2, 3), 128, 85) == 90085
    assert expected_teps_by_weight(LeosdParams(3, 3, 3), 64, 30).sum() == pytest.approx(411.25)


def brute_expected_teps(params, n, k, r):
    """Average over uniformly random (n-k-r) free bits of the TEP count, by enumeration."""
    rq = n - k - r
    tot = 0
    for w_pri in range(params.rho + 1):
        for w_free in range(rq + 1):
            if w_pri + w_free <= params.tau:
                tot += math.comb(r, w_pri) * math.comb(rq, w_free)
    return tot / 2 ** rq


@settings(max_examples=100)
@given(st.integers(4, 14), st.data())
def test_expected_teps_against_brute_force(n, data):
    k = data.draw(st.integers(1, n - 1))
    r = data.draw(st.integers(0, min(k, n - k)))
    rho, tau, xi = (data.draw(st.integers(0, 4)) for _ in range(3))
    p = LeosdParams(rho, tau, xi)
    assert expected_teps(p, n, k, r) == pytest.approx(brute_expected_teps(p, n, k, r))


def test_complexity_models():
    osd = complexity_osd(3, 64, 30)
    assert osd.flops == pytest.approx(2.94e5, rel=0.01) and osd.bops == pytest.approx(1.77e7, rel=0.01)
    le = complexity_leosd(LeosdParams(3, 3, 3), 64, 30)
    assert le.flops == pytest.approx(4.14e4, rel=0.01) and le.bops == pytest.approx(1.08e7, rel=0.01)


def test_parameter_selection_helpers():
    assert m_of_rho(3, 64, 30) == pytest.approx(4.2250, abs=5e-5)
    assert m_of_rho(5, 128, 50) == pytest.approx(14.02, abs=5e-3)
    assert math.ceil(osd_ml_order(14, 30, 1e-9)) == 3
    assert osd_ml_order(14, 30, n0_from_snr_db(6.0)) > osd_ml_order(14, 30, 1e-9)
    with pytest.raises(ValueError):
        osd_ml_order(14, 30, 10.0)


def test_bound_is_zero_with_maximal_caps():
    assert p_est_bound(LeosdParams(34, 34, 64), 64, 30, N0_2DB) == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=30)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
def test_bound_monotone_in_caps(rho, tau, xi):
    n0 = N0_2DB
    base = p_est_bound(LeosdParams(rho, tau, xi), 64, 30, n0, r_p=30)
    assert p_est_bound(LeosdParams(rho + 1, tau, xi), 64, 30, n0, r_p=30) <= base + 1e-12
    assert p_est_bound(LeosdParams(rho, tau + 1, xi), 64, 30, n0, r_p=30) <= base + 1e-12
    assert p_est_bound(LeosdParams(rho, tau, xi + 1), 64, 30, n0, r_p=30) <= base + 1e-12


@pytest.mark.parametrize("snr", [6.0, 7.0, 8.0])
def test_asymptotic_bound_dominates(snr):
    n0 = n0_from_snr_db(snr)
    p = LeosdParams(2, 2, 2)
    assert asymptotic_pest(p, 64, 30, n0) >= p_est_bound(p, 64, 30, n0)


def test_bler_bound_two_db():
    p = LeosdParams(2, 2, 2)
    assert p_est_bound(p, 64, 30, N0_2DB) == pytest.approx(0.01448, abs=5e-5)
    assert bler_bound(p, 64, 30, N0_2DB, 0.0113) == pytest.approx(0.026, abs=5e-4)
    with pytest.raises(ValueError):
        bler_bound(p, 64, 30, N0_2DB, 1.5)


def list_miss(frame, code, params):
    """True when the transmitted all-zero word lies outside the estimate list."""
    pre = preprocess(frame, code)
    p = params.clamp(pre.r_P, code.n, code.k)
    err = pre.y_t
    e = err[code.k:]
    if e[pre.perm_Q[pre.r_Q:]].sum() > p.rho or e.sum() > p.tau:
        return True
    return e.sum() + err[pre.perm_P[pre.r_P:]].sum() > p.xi


def test_bound_covers_simulated_list_miss(ebch64_30):
    rng = np.random.default_rng(11)
    p = LeosdParams(2, 2, 2)
    trials = 6000
    zero = np.zeros(64, dtype=np.uint8)
    misses = sum(list_miss(transmit(zero, N0_2DB, rng), ebch64_30, p) for _ in range(trials))
    bound = p_est_bound(p, 64, 30, N0_2DB)
    assert misses / trials <= bound + 3 * math.sqrt(bound * (1 - bound) / trials)
