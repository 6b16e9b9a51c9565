"""LE-OSD with a TEP discarding condition and a decoding stopping condition.

Discarding: a (primary, extended) pair is dropped when its promising
probability P_d falls to the threshold P_d'.  Because P_d grows with
lambda = P(e_pri) P(e_ext) while D_min only shrinks, every later pair with
lambda <= lambda_max (the largest lambda discarded so far) is dropped without
evaluating P_d; a whole primary goes when P(e_pri) <= lambda_max.

Stopping: whenever an estimate improves D_min its success probability P_s is
evaluated and decoding ends once P_s >= P_s'.

All probabilities of flip patterns are handled in the log domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit
from scipy.special import log1p as _log1p
from scipy.stats import binom

from ._backend import get_kernels
from .channel import ReceivedFrame, bit_error_prob, log_bit_error_prob
from .codes import LinearCode
from .gf2_core import pack_bits, unpack_bits
from .leosd import LeosdParams, Preprocessed, affine_form, measured_counters, preprocess, to_original
from .osd_baseline import DecodeOutcome, _table, whd

__all__ = [
    "ConditionThresholds",
    "beta_index",
    "decode_improved",
    "log_pattern_prob",
    "mean_parity_error_prob",
    "promising_from_beta",
    "promising_probability",
    "success_probability",
    "tep_error_prob",
    "thresholds",
]

PS_FACTOR = 0.99
PD_FACTOR = 0.002


@dataclass(frozen=True)
class ConditionThresholds:
    """Threshold policy.

    With ``ps``/``pd`` left as None the per-frame defaults are used:
    P_s' = ps_factor * eps(x) and P_d' = pd_factor * sqrt((1 - eps(x)) / N(x)).
    eps(x) is a binomial tail over the k positions that TEPs can flip.  Its
    bit error probability is averaged over those same positions
    (``eps_source="tep"``) or over the parity-side segment that also feeds P_d
    (``"parity"``).
    """

    ps: float | None = None
    pd: float | None = None
    ps_factor: float = PS_FACTOR
    pd_factor: float = PD_FACTOR
    eps_source: str = "tep"

    def __post_init__(self):
        if self.eps_source not in ("tep", "parity"):
            raise ValueError("eps_source must be 'tep' or 'parity'")

    @classmethod
    def disabled(cls) -> "ConditionThresholds":
        return cls(ps=1.0, pd=0.0)


def _segment(pre: Preprocessed) -> np.ndarray:
    """Tilde positions 1..r_P and k+1..n-r_P (1-based)."""
    return np.concatenate([np.arange(pre.r_P), np.arange(pre.k, pre.n - pre.r_P)])


def mean_parity_error_prob(pre: Preprocessed) -> tuple[float, float]:
    """(p_bar, E[alpha]) averaged over the n - k positions of the parity-side segment."""
    seg = _segment(pre)
    a = pre.alpha_t[seg]
    nk = pre.n - pre.k
    return float(bit_error_prob(a, pre.n0).sum() / nk), float(a.sum() / nk)


def tep_error_prob(pre: Preprocessed) -> float:
    """Mean bit error probability over the k positions covered by primary and extended TEPs."""
    pos = np.concatenate([pre.pri_pos, pre.ext_pos])
    return float(bit_error_prob(pre.alpha_t[pos], pre.n0).mean())


def beta_index(d_min: float, ddot: float, ep_alpha: float, nk: int) -> int:
    if math.isinf(d_min):
        return nk
    v = (d_min - ddot) / ep_alpha
    if v <= 0:
        return 0
    return nk if v >= nk else int(math.floor(v))


def promising_from_beta(lam: float, beta: int, nk: int, p: float) -> float:
    a = binom.cdf(beta, nk, p)
    b = binom.cdf(beta, nk, 0.5)
    return float(lam * a + (1.0 - lam) * b)


def promising_probability(lam: float, d_min: float, ddot: float, pre: Preprocessed) -> float:
    """P_d for a pair with probability lam and flipped-reliability sum ddot."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    p, ep = mean_parity_error_prob(pre)
    nk = pre.n - pre.k
    return promising_from_beta(lam, beta_index(d_min, ddot, ep, nk), nk, p)


def log_pattern_prob(d, alpha, n0: float) -> float:
    """log of prod_{d_i=1} Pe_i * prod_{d_i=0} (1 - Pe_i)."""
    lpe, lq = log_bit_error_prob(alpha, n0)
    d = np.asarray(d).astype(bool)
    return float(lpe[d].sum() + lq[~d].sum())


def success_probability(lam: float, d_pattern, pre: Preprocessed) -> float:
    """P_s = 1 / (1 + (1 - lam) 2^(k-n) / P(d)) for difference pattern d (tilde order)."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    if lam == 1.0:
        return 1.0
    lr = float(_log1p(-lam)) + (pre.k - pre.n) * math.log(2.0) \
        - log_pattern_prob(d_pattern, pre.alpha_t, pre.n0)
    return float(expit(-lr))


def thresholds(code: LinearCode, params: LeosdParams, p_bar: float,
               ps_factor: float = PS_FACTOR, pd_factor: float = PD_FACTOR) -> tuple[float, float]:
    """(P_s', P_d') for mean bit error probability p_bar over the binomial's k positions."""
    n, k = code.n, code.k
    x = params.rho if k <= n - k else params.xi
    x = min(x, k)
    eps = float(binom.cdf(x, k, p_bar))
    N = sum(math.comb(k, i) for i in range(x + 1))
    return ps_factor * eps, pd_factor * math.sqrt(max(0.0, 1.0 - eps) / N)


def _log_odds_threshold(ps: float) -> float:
    """P_s >= ps  <=>  log((1-lam) 2^(k-n) / P(d)) <= this value."""
    if ps >= 1.0:
        return -math.inf
    if ps <= 0.0:
        return math.inf
    return math.log((1.0 - ps) / ps)


def decode_improved(frame: ReceivedFrame, code: LinearCode, params: LeosdParams,
                    policy: ConditionThresholds | None = None, shortcuts: bool = True,
                    pre: Preprocessed | None = None,
                    trace: np.ndarray | None = None) -> DecodeOutcome:
    """LE-OSD with discarding (cases a/b/c) and stopping conditions."""
    policy = ConditionThresholds() if policy is None else policy
    if pre is None:
        pre = preprocess(frame, code)
    n, k = pre.n, pre.k
    nk = n - k
    p = params.clamp(pre.r_P, n, k)
    p_bar, ep_alpha = mean_parity_error_prob(pre)
    p_eps = tep_error_prob(pre) if policy.eps_source == "tep" else p_bar
    ps_def, pd_def = thresholds(code, p, p_eps, policy.ps_factor, policy.pd_factor)
    ps = ps_def if policy.ps is None else policy.ps
    pd = pd_def if policy.pd is None else policy.pd

    base, A, B = affine_form(pre)
    kern = get_kernels()
    W = (n + 63) // 64
    a_ext = np.ascontiguousarray(pre.alpha_t[pre.ext_pos])
    ext_words, ext_cum, ext_asum = kern.ext_table(pack_bits(B).reshape(B.shape[0], W), a_ext, p.xi)
    pmask = np.zeros(n, dtype=np.uint8)
    pmask[k:] = 1
    _, lq = log_bit_error_prob(pre.alpha_t, pre.n0)
    grid = np.arange(nk + 1)
    cdf_a = binom.cdf(grid, nk, p_bar)
    cdf_b = binom.cdf(grid, nk, 0.5)
    best, _, stats = kern.ile_reprocess(
        pack_bits(base), pack_bits(A).reshape(A.shape[0], W),
        np.ascontiguousarray(pre.alpha_t[pre.pri_pos]), ext_words, ext_cum, ext_asum,
        pack_bits(pre.y_t), pack_bits(pmask), _table(pre.alpha_t, n),
        p.rho, p.tau, p.xi, 4.0 / pre.n0,
        float(lq[pre.pri_pos].sum()), float(lq[pre.ext_pos].sum()),
        cdf_a, cdf_b, max(ep_alpha, np.finfo(float).tiny), float(pd),
        _log_odds_threshold(ps), float(lq.sum()), (k - n) * math.log(2.0), bool(shortcuts),
        np.zeros((0, 2), dtype=np.int64) if trace is None else trace)
    c = to_original(unpack_bits(best, n), pre)
    n_pri, q_t, q_c = int(stats[0]), int(stats[1]), int(stats[2])
    counters = measured_counters(pre, n_pri - int(stats[4]), q_t, q_c)
    counters.add(flops=3 * n + n_pri + 2 * int(stats[10]) + (2 * nk + 4) * int(stats[7])
                 + (n + 3) * int(stats[8]))
    info = {
        "r_P": pre.r_P, "params": p, "primaries": n_pri, "traced": int(stats[3]),
        "case_a": int(stats[4]), "case_b": int(stats[5]), "case_c": int(stats[6]),
        "pd_evals": int(stats[7]), "ps_evals": int(stats[8]), "nonfinite": int(stats[11]),
        "p_bar": p_bar, "p_eps": p_eps, "ep_alpha": ep_alpha, "ps_threshold": ps, "pd_threshold": pd,
    }
    return DecodeOutcome(c, whd(c, frame.y, frame.alpha), q_t, q_c, counters,
                         early_stop=bool(stats[9]), info=info)
