"""Closed-form evaluators: ordered reliabilities, error-count distributions,
list-miss bounds, expected TEP/estimate counts and operation-count models.

Reliabilities are the magnitudes |gamma| of BPSK symbols in AWGN with noise
density N0 (noise variance N0 / 2).  Ordered statistics are ascending: the
i-th ordered reliability is the i-th smallest of n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln
from scipy.stats import norm

from .leosd import LeosdParams
from .osd_baseline import OpCounters, c_ge

__all__ = [
    "AnalysisConfig",
    "asymptotic_pest",
    "bler_bound",
    "complexity_leosd",
    "complexity_osd",
    "error_count_pmf",
    "error_count_pmf_all",
    "expected_estimates",
    "expected_teps",
    "expected_teps_by_weight",
    "full_rank_prob",
    "integrate",
    "log_comb",
    "m_of_rho",
    "ordered_reliability_pdf",
    "osd_ml_order",
    "p_est_bound",
    "q_func",
    "reliability_cdf",
    "reliability_pdf",
]


@dataclass(frozen=True)
class AnalysisConfig:
    """Quadrature settings: ``nodes`` Gauss-Legendre points split into panels of 16
    over [0, 1 + sigmas * sqrt(N0 / 2)]."""

    nodes: int = 2048
    sigmas: float = 10.0

    def __post_init__(self):
        if self.sigmas < 8:
            raise ValueError("truncation must cover at least 8 standard deviations")
        if self.nodes < 16 or self.nodes % 16:
            raise ValueError("nodes must be a positive multiple of 16")


DEFAULT = AnalysisConfig()


def q_func(x):
    return norm.sf(x)


def log_comb(n, k):
    return gammaln(np.asarray(n) + 1.0) - gammaln(np.asarray(k) + 1.0) - gammaln(np.asarray(n) - np.asarray(k) + 1.0)


def reliability_pdf(alpha, n0: float):
    a = np.asarray(alpha, dtype=np.float64)
    f = (np.exp(-(a + 1.0) ** 2 / n0) + np.exp(-(a - 1.0) ** 2 / n0)) / math.sqrt(math.pi * n0)
    return np.where(a >= 0, f, 0.0)


def reliability_cdf(alpha, n0: float):
    a = np.asarray(alpha, dtype=np.float64)
    s = math.sqrt(n0 / 2.0)
    F = 1.0 - q_func((a + 1.0) / s) - q_func((a - 1.0) / s)
    return np.where(a >= 0, np.clip(F, 0.0, 1.0), 0.0)


def _log_sf_reliability(a, n0: float):
    """log(1 - F(a)) = log(Q((a+1)/s) + Q((a-1)/s)), accurate in the tail."""
    s = math.sqrt(n0 / 2.0)
    return np.logaddexp(norm.logsf((a + 1.0) / s), norm.logsf((a - 1.0) / s))


def ordered_reliability_pdf(i: int, n: int, alpha, n0: float):
    """Density of the i-th smallest of n i.i.d. reliabilities."""
    if not 1 <= i <= n:
        raise ValueError("need 1 <= i <= n")
    a = np.asarray(alpha, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        F = reliability_cdf(a, n0)
        logc = gammaln(n + 1.0) - gammaln(i) - gammaln(n - i + 1.0)
        lf = np.log(reliability_pdf(a, n0))
        lF = np.log(F) if i > 1 else 0.0
        lS = _log_sf_reliability(a, n0)
        val = np.exp(logc + (i - 1) * lF + (n - i) * lS + lf)
    return np.where(a >= 0, np.nan_to_num(val, nan=0.0, posinf=0.0), 0.0)


def _nodes(n0: float, cfg: AnalysisConfig):
    upper = 1.0 + cfg.sigmas * math.sqrt(n0 / 2.0)
    x16, w16 = leggauss(16)
    panels = cfg.nodes // 16
    edges = np.linspace(0.0, upper, panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    x = (mid[:, None] + half[:, None] * x16[None, :]).ravel()
    w = (half[:, None] * w16[None, :]).ravel()
    return x, w


def integrate(fn, n0: float, cfg: AnalysisConfig = DEFAULT) -> float:
    """Integral of fn(alpha) over the reliability support."""
    x, w = _nodes(n0, cfg)
    return float(np.sum(w * fn(x)))


def _p_err_above(x, n0: float):
    """Error probability of a bit given its reliability exceeds x."""
    s = math.sqrt(n0 / 2.0)
    return 1.0 / (1.0 + np.exp(norm.logsf((x - 1.0) / s) - norm.logsf((x + 1.0) / s)))


def error_count_pmf_all(a: int, n: int, n0: float, cfg: AnalysisConfig = DEFAULT) -> np.ndarray:
    """pmf of the number of hard-decision errors among ordered positions a..n."""
    if not 2 <= a <= n:
        raise ValueError("error_count_pmf needs 2 <= a <= n (the a = 1 case is undefined)")
    m = n - a + 1
    x, w = _nodes(n0, cfg)
    dens = ordered_reliability_pdf(a - 1, n, x, n0)
    p = np.clip(_p_err_above(x, n0), 1e-300, 1.0)
    lq = np.log1p(-np.minimum(p, 1.0 - 1e-16))
    j = np.arange(m + 1)
    logb = log_comb(m, j)[:, None] + j[:, None] * np.log(p)[None, :] + (m - j)[:, None] * lq[None, :]
    return np.clip(np.exp(logb) @ (w * dens), 0.0, 1.0)


def error_count_pmf(a: int, n: int, j: int, n0: float, cfg: AnalysisConfig = DEFAULT) -> float:
    if not 0 <= j <= n - a + 1:
        raise ValueError("need 0 <= j <= n - a + 1")
    return float(error_count_pmf_all(a, n, n0, cfg)[j])


def _cdf_upto(a: int, n: int, cap: int, n0: float, cfg: AnalysisConfig) -> float:
    pmf = error_count_pmf_all(a, n, n0, cfg)
    return float(min(1.0, pmf[:min(cap, pmf.shape[0] - 1) + 1].sum()))


def p_est_bound(params: LeosdParams, n: int, k: int, n0: float, r_p: int | None = None,
                cfg: AnalysisConfig = DEFAULT) -> float:
    """Upper bound on the probability that the transmitted word is not among the estimates.

    With ``r_p`` omitted the full-rank case r_P = min(k, n - k) is assumed and the
    rate-specific simplification is used; otherwise all three segment terms enter.
    """
    rho, tau, xi = params.rho, params.tau, params.xi
    if r_p is None:
        if k == n - k:
            return max(0.0, 1.0 - _cdf_upto(n - k + 1, n, rho, n0, cfg))
        if k < n - k:
            terms = [_cdf_upto(n - k + 1, n, rho, n0, cfg), _cdf_upto(k + 1, n, tau, n0, cfg)]
        else:
            terms = [_cdf_upto(k + 1, n, tau, n0, cfg), _cdf_upto(n - k + 1, n, xi, n0, cfg)]
    else:
        if not 1 <= r_p <= min(k, n - k):
            raise ValueError("r_p must lie in [1, min(k, n-k)]")
        terms = [_cdf_upto(n - r_p + 1, n, rho, n0, cfg), _cdf_upto(k + 1, n, tau, n0, cfg),
                 _cdf_upto(r_p + 1, n, xi, n0, cfg)]
    return float(min(1.0, max(0.0, 1.0 - min(terms))))


def bler_bound(params: LeosdParams, n: int, k: int, n0: float, p_ml: float,
               r_p: int | None = None, cfg: AnalysisConfig = DEFAULT) -> float:
    """BLER upper bound P_est + P_ML; ``p_ml`` comes from elsewhere (simulation or a bound)."""
    if not 0.0 <= p_ml <= 1.0:
        raise ValueError("p_ml must lie in [0, 1]")
    return min(1.0, p_est_bound(params, n, k, n0, r_p, cfg) + p_ml)


def full_rank_prob(n: int, k: int) -> float:
    """Probability that a uniform random k x (n-k) binary matrix has full rank."""
    if not 0 < k < n:
        raise ValueError("need 0 < k < n")
    a, b = min(k, n - k), max(k, n - k)
    return float(np.prod([1.0 - 2.0 ** (l - 1 - b) for l in range(1, a + 1)]))


def asymptotic_pest(params: LeosdParams, n: int, k: int, n0: float, r_p: int | None = None) -> float:
    r_p = min(k, n - k) if r_p is None else r_p
    rho, tau, xi = params.rho, params.tau, params.xi
    terms = [
        math.comb(r_p, rho + 1) * math.exp(-4.0 * (rho + 1) / n0),
        math.comb(n - k, tau + 1) * math.exp(-4.0 * (tau + 1) / n0),
        math.comb(n - r_p, xi + 1) * math.exp(-4.0 * (xi + 1) / n0),
    ]
    return float(max(terms))


def osd_ml_order(d_h: int, k: int, n0: float) -> float:
    """Real-valued order above which OSD is asymptotically near-ML."""
    den = 4.0 - n0 * math.log(k)
    if den <= 0:
        raise ValueError("N0 log k >= 4: outside the asymptotic regime")
    return d_h / den - 1.0


def m_of_rho(rho: float, n: int, k: int) -> float:
    """OSD order roughly matching an LE-OSD with primary cap rho."""
    if not 0 < k < n:
        raise ValueError("need 0 < k < n")
    return rho * math.sqrt((n - k) / k) + 0.5 * (n - k - math.sqrt((n - k) * k))


def _full_rank(n: int, k: int, r_p: int | None) -> int:
    r = min(k, n - k) if r_p is None else r_p
    if not 0 <= r <= min(k, n - k):
        raise ValueError("r_p must lie in [0, min(k, n-k)]")
    return r


def expected_teps_by_weight(params: LeosdParams, n: int, k: int, r_p: int | None = None) -> np.ndarray:
    """Mean number of processed TEPs of each weight j = 0..tau."""
    r = _full_rank(n, k, r_p)
    rq = n - k - r
    out = np.zeros(params.tau + 1)
    for j in range(params.tau + 1):
        tot = 0
        for l in range(min(params.rho, j) + 1):
            tot += math.comb(r, l) * math.comb(rq, j - l)
        out[j] = tot / 2.0 ** rq
    return out


def expected_teps(params: LeosdParams, n: int, k: int, r_p: int | None = None) -> float:
    r = _full_rank(n, k, r_p)
    rq = n - k - r
    if rq == 0:
        return float(sum(math.comb(r, l) for l in range(min(params.rho, params.tau) + 1)))
    tot = 0
    for l in range(params.rho + 1):
        for j in range(params.tau - l + 1):
            tot += math.comb(r, l) * math.comb(rq, j)
    return tot / 2.0 ** rq


def expected_estimates(params: LeosdParams, n: int, k: int, r_p: int | None = None) -> float:
    r = _full_rank(n, k, r_p)
    per = expected_teps_by_weight(params, n, k, r)
    tot = 0.0
    for j in range(params.tau + 1):
        tot += per[j] * sum(math.comb(k - r, u) for u in range(max(params.xi - j, -1) + 1))
    return float(tot)


def complexity_leosd(params: LeosdParams, n: int, k: int, r_p: int | None = None,
                     mu_t: float | None = None, mu_c: float | None = None) -> OpCounters:
    """Preprocessing plus reprocessing BOPs/FLOPs (sort cost n ln n)."""
    r = _full_rank(n, k, r_p)
    nk, rq = n - k, n - k - r
    mu_t = expected_teps(params, n, k, r) if mu_t is None else mu_t
    mu_c = expected_estimates(params, n, k, r) if mu_c is None else mu_c
    n_pri = sum(math.comb(r, i) for i in range(params.rho + 1))
    bops = (5 * n + c_ge(k, n) + c_ge(k, nk) + c_ge(rq, nk) + 2 * rq * nk + rq ** 2
            + 2 * n_pri * nk * (r + 2) + 2 * mu_t * nk * (nk + 1) + 2 * mu_c * (k - r) * (k + 1))
    flops = n + n * math.log(n) + mu_c * (n + 1) + mu_t * (nk + 1)
    return OpCounters(float(bops), float(flops))


def complexity_osd(order: int, n: int, k: int) -> OpCounters:
    teps = sum(math.comb(k, i) for i in range(order + 1))
    bops = 5 * n + c_ge(k, n) + teps * (2 * k * n + n)
    flops = n + n * math.log(n) + teps * (n + 1)
    return OpCounters(float(bops), float(flops))
