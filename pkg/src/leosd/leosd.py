"""Linear-equation OSD.

Reliabilities are sorted in ascending order, so after elimination of the
generator the parity block occupies the most reliable positions.  Test error
patterns (TEPs) are placed on those parity positions and every codeword
estimate is recovered by solving ``x P~ = y~_P + e`` for the information part.

Coordinates: after preprocessing every vector lives in the "tilde" order
``perm_total``; position ``i`` of a tilde vector is original position
``perm_total[i]``.  The parity segment is ``[k, n)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ._backend import get_kernels
from .channel import ReceivedFrame, sort_ascending
from .codes import LinearCode
from .gf2_core import ge_systematic, pack_bits, unpack_bits
from .osd_baseline import DecodeOutcome, OpCounters, _table, c_ge, whd

__all__ = [
    "LeosdParams",
    "Preprocessed",
    "affine_form",
    "decode",
    "iter_estimates",
    "measured_counters",
    "preprocess",
    "recover_estimates",
    "tep_from_primary",
    "to_original",
]


def _mm(A, B) -> np.ndarray:
    return ((np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64)) & 1).astype(np.uint8)


@dataclass(frozen=True)
class LeosdParams:
    """Weight caps: rho on primary TEPs, tau on TEPs, xi on TEP plus extended TEP."""

    rho: int
    tau: int
    xi: int

    def __post_init__(self):
        if min(self.rho, self.tau, self.xi) < 0:
            raise ValueError("weight caps must be nonnegative")

    def clamp(self, r_p: int, n: int, k: int) -> "LeosdParams":
        """Project onto the feasible box for a frame with rank r_p.

        Upper caps that can never bind are lowered; an inner cap that exceeds
        an outer one (tau > xi, rho > tau) is lowered to the outer cap, which
        leaves the enumerated set unchanged.
        """
        r_q = n - k - r_p
        rho = min(self.rho, r_p)
        tau = min(self.tau, rho + r_q)
        xi = min(self.xi, tau + k - r_p)
        tau = min(tau, xi)
        rho = min(rho, tau)
        return LeosdParams(rho, tau, xi)


@dataclass(frozen=True)
class Preprocessed:
    n: int
    k: int
    n0: float
    perm_a: np.ndarray
    perm_g: np.ndarray
    perm_total: np.ndarray
    Gsys: np.ndarray  # [I_k | P~]
    P: np.ndarray  # P~, k x (n-k)
    y_t: np.ndarray
    alpha_t: np.ndarray
    E_P: np.ndarray
    perm_P: np.ndarray
    r_P: int
    R_P: np.ndarray  # E_P P~^T[:, perm_P]
    Q: np.ndarray  # last n-k-r_P rows of E_P
    E_Q: np.ndarray
    perm_Q: np.ndarray
    r_Q: int
    Q_prime: np.ndarray
    Q_r: np.ndarray
    Q_t: np.ndarray  # (n-k) x r_P
    P_r: np.ndarray
    P_t: np.ndarray  # k x (k-r_P)
    e0: np.ndarray  # in perm_Q coordinates

    @property
    def y_P(self) -> np.ndarray:
        return self.y_t[self.k:]

    @property
    def y_B(self) -> np.ndarray:
        return self.y_t[:self.k]

    @property
    def pri_pos(self) -> np.ndarray:
        """Tilde positions of the primary coordinates."""
        return self.k + self.perm_Q[self.r_Q:]

    @property
    def ext_pos(self) -> np.ndarray:
        """Tilde positions of the extended coordinates."""
        return self.perm_P[self.r_P:]


def preprocess(frame: ReceivedFrame, code: LinearCode) -> Preprocessed:
    n, k = code.n, code.k
    if frame.n != n:
        raise ValueError("frame length does not match the code")
    if k >= n:
        raise ValueError("code has no parity positions")
    nk = n - k
    perm_a, _, _ = sort_ascending(frame)
    ge1 = ge_systematic(code.G[:, perm_a], track=False)
    if ge1.rank != k:
        raise ValueError("generator matrix is rank deficient")
    perm_g = ge1.perm
    perm_total = perm_a[perm_g]
    Gsys = ge1.R
    P = np.ascontiguousarray(Gsys[:, k:])
    y_t = frame.y[perm_total]
    alpha_t = frame.alpha[perm_total]

    ge2 = ge_systematic(np.ascontiguousarray(P.T))
    E_P, perm_P, r_P, R_P = ge2.E, ge2.perm, ge2.rank, ge2.R
    r_Q = nk - r_P
    if r_Q > 0:
        Q = np.ascontiguousarray(E_P[r_P:, :])
        ge3 = ge_systematic(Q)
        if ge3.rank != r_Q:
            raise AssertionError("rows of an invertible E_P must be independent")
        E_Q, perm_Q, Q_prime = ge3.E, ge3.perm, ge3.R
        Q_r = Q_prime[:, r_Q:]
        e0 = np.concatenate([_mm(E_Q, _mm(Q, y_t[k:])), np.zeros(r_P, dtype=np.uint8)])
    else:
        Q = np.zeros((0, nk), dtype=np.uint8)
        E_Q = np.zeros((0, 0), dtype=np.uint8)
        perm_Q = np.arange(nk)
        Q_prime = Q
        Q_r = np.zeros((0, r_P), dtype=np.uint8)
        e0 = np.zeros(nk, dtype=np.uint8)
    Q_t = np.vstack([Q_r, np.eye(r_P, dtype=np.uint8)])
    P_r = R_P[:r_P, r_P:]
    P_t = np.vstack([P_r, np.eye(k - r_P, dtype=np.uint8)])
    return Preprocessed(n, k, frame.n0, perm_a, perm_g, perm_total, Gsys, P, y_t, alpha_t,
                        E_P, perm_P, r_P, R_P, Q, E_Q, perm_Q, r_Q, Q_prime, Q_r, Q_t,
                        P_r, P_t, e0)


def tep_from_primary(e_pri, pre: Preprocessed) -> np.ndarray:
    """Valid TEP (parity segment, tilde order) indexed by a primary TEP."""
    e_pri = np.asarray(e_pri, dtype=np.uint8)
    if e_pri.shape != (pre.r_P,):
        raise ValueError(f"primary TEP must have length r_P={pre.r_P}")
    ep = _mm(pre.Q_t, e_pri) ^ pre.e0
    e = np.empty_like(ep)
    e[pre.perm_Q] = ep
    return e


def _x_from_z(z: np.ndarray, k: int) -> np.ndarray:
    nk = z.shape[-1]
    if k <= nk:
        return z[..., :k]
    pad = np.zeros(z.shape[:-1] + (k - nk,), dtype=np.uint8)
    return np.concatenate([z, pad], axis=-1)


def _estimate(pre: Preprocessed, e: np.ndarray, x_e: np.ndarray, e_ext: np.ndarray) -> np.ndarray:
    tail = pre.y_B[pre.perm_P][pre.r_P:]
    x_j = _mm(pre.P_t, tail ^ e_ext)
    xp = x_e ^ x_j
    x = np.empty_like(xp)
    x[pre.perm_P] = xp
    return np.concatenate([x, pre.y_P ^ e])


def _ext_patterns(s: int, cap: int):
    for w in range(min(cap, s) + 1):
        for S in combinations(range(s), w):
            v = np.zeros(s, dtype=np.uint8)
            v[list(S)] = 1
            yield v


def recover_estimates(e, pre: Preprocessed, xi: int) -> list[np.ndarray]:
    """All estimates for TEP ``e`` with extended weight <= xi - w(e) (tilde order)."""
    e = np.asarray(e, dtype=np.uint8)
    z = _mm(pre.E_P, e ^ pre.y_P)
    x_e = _x_from_z(z, pre.k)
    cap = xi - int(e.sum())
    if cap < 0:
        return []
    return [_estimate(pre, e, x_e, v) for v in _ext_patterns(pre.k - pre.r_P, cap)]


def iter_estimates(pre: Preprocessed, params: LeosdParams):
    """Reference enumeration in decoder order.

    Yields (primary ordinal, extended ordinal, TEP, estimate) for every
    estimate the decoder generates with the given (already clamped) caps.
    """
    ordinal = 0
    for w in range(params.rho + 1):
        for S in combinations(range(pre.r_P), w):
            e_pri = np.zeros(pre.r_P, dtype=np.uint8)
            e_pri[list(S)] = 1
            e = tep_from_primary(e_pri, pre)
            if int(e.sum()) <= params.tau:
                for j, c in enumerate(recover_estimates(e, pre, params.xi)):
                    yield ordinal, j, e, c
            ordinal += 1


def to_original(c_tilde, pre: Preprocessed) -> np.ndarray:
    c = np.empty(pre.n, dtype=np.uint8)
    c[pre.perm_total] = c_tilde
    return c


def affine_form(pre: Preprocessed):
    """Estimates as an affine map of (primary, extended) TEP bits.

    Returns (base, A, B): the estimate for primary set S and extended set T
    equals base ^ XOR(A[S]) ^ XOR(B[T]), all in tilde order.
    """
    n, k, r_P = pre.n, pre.k, pre.r_P
    e = tep_from_primary(np.zeros(r_P, dtype=np.uint8), pre)
    x_e = _x_from_z(_mm(pre.E_P, e ^ pre.y_P), k)
    base = _estimate(pre, e, x_e, np.zeros(k - r_P, dtype=np.uint8))

    dE = np.zeros((r_P, n - k), dtype=np.uint8)
    dE[:, pre.perm_Q] = pre.Q_t.T
    dX = np.zeros((r_P, k), dtype=np.uint8)
    dX[:, pre.perm_P] = _x_from_z(_mm(dE, pre.E_P.T), k)
    A = np.hstack([dX, dE])

    B = np.zeros((k - r_P, n), dtype=np.uint8)
    B[:, pre.perm_P] = pre.P_t.T
    return base, np.ascontiguousarray(A), B


def measured_counters(pre: Preprocessed, n_pri: int, q_t: int, q_c: int) -> OpCounters:
    n, k, r_P = pre.n, pre.k, pre.r_P
    nk, r_q = n - k, pre.r_Q
    c = OpCounters()
    c.add(bops=5 * n + c_ge(k, n) + c_ge(k, nk) + c_ge(r_q, nk) + 2 * r_q * nk + r_q ** 2,
          flops=n + n * math.log(n))
    c.add(bops=2 * n_pri * nk * (r_P + 2) + 2 * q_t * nk * (nk + 1) + 2 * q_c * (k - r_P) * (k + 1),
          flops=q_c * (n + 1) + q_t * (nk + 1))
    return c


def _check_validity(pre: Preprocessed, base: np.ndarray, A: np.ndarray) -> None:
    # validity is affine in the primary bits, so base and each row suffice
    k = pre.k
    if pre.r_Q == 0:
        return
    if _mm(pre.Q, base[k:]).any() or _mm(A[:, k:], pre.Q.T).any():
        raise AssertionError("generated TEP violates e Q^T = y_P Q^T")
    if _mm(pre.Gsys[:, k:].T, base[:k]).tolist() != (base[k:]).tolist():
        raise AssertionError("base estimate is not a codeword")


def decode(frame: ReceivedFrame, code: LinearCode, params: LeosdParams,
           pre: Preprocessed | None = None, trace: np.ndarray | None = None,
           check: bool = False) -> DecodeOutcome:
    """LE-OSD: enumerate primary TEPs, keep w(e) <= tau, recover estimates, minimise WHD."""
    if pre is None:
        pre = preprocess(frame, code)
    n, k = pre.n, pre.k
    p = params.clamp(pre.r_P, n, k)
    base, A, B = affine_form(pre)
    if check:
        _check_validity(pre, base, A)
    kern = get_kernels()
    W = (n + 63) // 64
    ext_words, ext_cum, _ = kern.ext_table(pack_bits(B).reshape(B.shape[0], W),
                                           np.ascontiguousarray(pre.alpha_t[pre.ext_pos]), p.xi)
    pmask = np.zeros(n, dtype=np.uint8)
    pmask[k:] = 1
    best, _, stats = kern.reprocess(
        pack_bits(base), pack_bits(A).reshape(A.shape[0], W), ext_words, ext_cum,
        pack_bits(pre.y_t), pack_bits(pmask), _table(pre.alpha_t, n), p.rho, p.tau, p.xi,
        np.zeros((0, 2), dtype=np.int64) if trace is None else trace)
    c = to_original(unpack_bits(best, n), pre)
    n_pri, q_t, q_c = int(stats[0]), int(stats[1]), int(stats[2])
    return DecodeOutcome(c, whd(c, frame.y, frame.alpha), q_t, q_c,
                         measured_counters(pre, n_pri, q_t, q_c),
                         info={"r_P": pre.r_P, "params": p, "primaries": n_pri,
                               "traced": int(stats[3])})
