"""Loop kernels written for numba's nopython mode.

Bit vectors inside the kernels are packed little-endian into uint64 words:
bit ``i`` lives in word ``i >> 6`` at position ``i & 63``.  Weighted Hamming
distances are evaluated with a per-frame byte table ``T[t, v]`` holding the
sum of reliabilities of the set bits of byte value ``v`` at byte offset ``t``.

When the numba backend is inactive the decorator is the identity and these
functions run as plain Python (slow, but bit-identical).
"""
from __future__ import annotations

import math

import numpy as np

from ._backend import BACKEND

if BACKEND == "numba":
    from numba import njit

    def jit(fn):
        return njit(cache=True, nogil=True)(fn)

else:

    def jit(fn):
        return fn


_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_MB = np.uint64(0xFF)
_S1 = np.uint64(1)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S8 = np.uint64(8)
_S16 = np.uint64(16)
_S32 = np.uint64(32)
_M7 = np.uint64(0x7F)


@jit
def popcount64(x):
    x = x - ((x >> _S1) & _M1)
    x = (x & _M2) + ((x >> _S2) & _M2)
    x = (x + (x >> _S4)) & _M4
    x = x + (x >> _S8)
    x = x + (x >> _S16)
    x = x + (x >> _S32)
    return np.int64(x & _M7)


@jit
def ge_reduce(A, track):
    """Reduced echelon form of a 0/1 uint8 matrix.

    Returns (R, E, perm, rank) with E @ A[:, perm] == R over GF(2).  Pivot
    column r is the first column at or right of r with a nonzero entry in
    rows r.., swapped into place.
    """
    m, n = A.shape
    R = A.copy()
    E = np.zeros((m, m), dtype=np.uint8)
    if track:
        for i in range(m):
            E[i, i] = 1
    perm = np.arange(n)
    rank = 0
    for r in range(min(m, n)):
        piv_row = -1
        piv_col = -1
        for j in range(r, n):
            for i in range(r, m):
                if R[i, j] != 0:
                    piv_row = i
                    break
            if piv_row >= 0:
                piv_col = j
                break
        if piv_col < 0:
            break
        if piv_col != r:
            for i in range(m):
                t = R[i, r]
                R[i, r] = R[i, piv_col]
                R[i, piv_col] = t
            t2 = perm[r]
            perm[r] = perm[piv_col]
            perm[piv_col] = t2
        if piv_row != r:
            for c in range(n):
                t = R[r, c]
                R[r, c] = R[piv_row, c]
                R[piv_row, c] = t
            if track:
                for c in range(m):
                    t = E[r, c]
                    E[r, c] = E[piv_row, c]
                    E[piv_row, c] = t
        for i in range(m):
            if i != r and R[i, r] != 0:
                for c in range(r, n):
                    R[i, c] ^= R[r, c]
                if track:
                    for c in range(m):
                        E[i, c] ^= E[r, c]
        rank += 1
    return R, E, perm, rank


@jit
def whd_table(alpha, nbytes):
    n = alpha.shape[0]
    T = np.zeros((nbytes, 256), dtype=np.float64)
    for t in range(nbytes):
        for v in range(1, 256):
            low = v & (-v)
            j = 0
            while (low >> j) != 1:
                j += 1
            pos = 8 * t + j
            a = alpha[pos] if pos < n else 0.0
            T[t, v] = T[t, v ^ low] + a
    return T


@jit
def _whd(cw, y, table):
    s = 0.0
    for t in range(table.shape[0]):
        word = cw[t >> 3] ^ y[t >> 3]
        b = (word >> np.uint64((t & 7) * 8)) & _MB
        s += table[t, np.intp(b)]
    return s


@jit
def _binom_table(nmax):
    C = np.zeros((nmax + 1, nmax + 1), dtype=np.int64)
    for i in range(nmax + 1):
        C[i, 0] = 1
        for j in range(1, i + 1):
            C[i, j] = C[i - 1, j - 1] + C[i - 1, j]
    return C


@jit
def ext_table(rows, alpha, wmax):
    """All XOR combinations of ``rows`` with weight <= wmax.

    Ordered by weight, then lexicographically by index tuple.  Returns the
    packed combinations, cumulative counts per weight and the reliability sum
    of the selected positions.
    """
    s, W = rows.shape
    wmax = min(wmax, s)
    C = _binom_table(s)
    cum = np.zeros(wmax + 1, dtype=np.int64)
    total = 0
    for w in range(wmax + 1):
        total += C[s, w]
        cum[w] = total
    out = np.zeros((total, W), dtype=np.uint64)
    asum = np.zeros(total, dtype=np.float64)
    idx = np.zeros(wmax + 1, dtype=np.int64)
    pos = 0
    for w in range(wmax + 1):
        for d in range(w):
            idx[d] = d
        while True:
            a = 0.0
            for d in range(w):
                a += alpha[idx[d]]
                for q in range(W):
                    out[pos, q] ^= rows[idx[d], q]
            asum[pos] = a
            pos += 1
            d = w - 1
            while d >= 0 and idx[d] == s - w + d:
                d -= 1
            if d < 0:
                break
            idx[d] += 1
            for e in range(d + 1, w):
                idx[e] = idx[e - 1] + 1
    return out, cum, asum


@jit
def reprocess(base, pri, ext, ext_cum, y, pmask, table, rho, tau, xi, trace):
    """Enumerate primary x extended combinations and keep the min-WHD word.

    The candidate for primary set S and extended index j is
    ``base ^ XOR(pri[S]) ^ ext[j]``.  Primaries are enumerated by weight then
    lexicographically; a primary is kept when the parity part of its
    difference from ``y`` (selected by ``pmask``) has weight <= tau, and then
    feeds the first ``ext_cum[xi - w]`` extended rows.

    stats = [primaries, q_t, q_c, traced]
    """
    W = base.shape[0]
    r = pri.shape[0]
    ncap = ext_cum.shape[0] - 1
    rho = min(rho, r)
    best = base.copy()
    best_whd = np.inf
    stats = np.zeros(4, dtype=np.int64)
    acc = np.zeros((rho + 1, W), dtype=np.uint64)
    idx = np.zeros(rho + 1, dtype=np.int64)
    cw = np.zeros(W, dtype=np.uint64)
    cap_trace = trace.shape[0]
    for w in range(rho + 1):
        for d in range(w):
            idx[d] = d
        for q in range(W):
            acc[0, q] = base[q]
        for d in range(w):
            for q in range(W):
                acc[d + 1, q] = acc[d, q] ^ pri[idx[d], q]
        while True:
            npri = stats[0]
            stats[0] += 1
            we = 0
            for q in range(W):
                we += popcount64((acc[w, q] ^ y[q]) & pmask[q])
            if we <= tau:
                stats[1] += 1
                cap = xi - we
                if cap >= 0:
                    if cap > ncap:
                        cap = ncap
                    for j in range(ext_cum[cap]):
                        for q in range(W):
                            cw[q] = acc[w, q] ^ ext[j, q]
                        s = _whd(cw, y, table)
                        if stats[3] < cap_trace:
                            trace[stats[3], 0] = npri
                            trace[stats[3], 1] = j
                            stats[3] += 1
                        stats[2] += 1
                        if s < best_whd:
                            best_whd = s
                            for q in range(W):
                                best[q] = cw[q]
            d = w - 1
            while d >= 0 and idx[d] == r - w + d:
                d -= 1
            if d < 0:
                break
            idx[d] += 1
            for e in range(d + 1, w):
                idx[e] = idx[e - 1] + 1
            for e in range(d, w):
                for q in range(W):
                    acc[e + 1, q] = acc[e, q] ^ pri[idx[e], q]
    return best, best_whd, stats


@jit
def promising(lam, d_min, ddot, ep_alpha, cdf_a, cdf_b):
    nk = cdf_a.shape[0] - 1
    if d_min == np.inf:
        beta = nk
    else:
        v = (d_min - ddot) / ep_alpha
        if v <= 0.0:
            beta = 0
        elif v >= nk:
            beta = nk
        else:
            beta = int(math.floor(v))
    return lam * cdf_a[beta] + (1.0 - lam) * cdf_b[beta]


@jit
def ile_reprocess(base, pri, alpha_pri, ext, ext_cum, ext_asum, y, pmask, table,
                  rho, tau, xi, k4, lpri0, lext0, cdf_a, cdf_b, ep_alpha,
                  pd_thr, lr_thr, s0_all, logc, shortcuts, trace):
    """Reprocessing with the discarding and stopping conditions.

    Log-probabilities use log Pe - log(1 - Pe) = -k4 * alpha, so a flip set
    with reliability sum D contributes -k4 * D on top of the all-correct
    baseline (lpri0, lext0, s0_all).  The stop test compares the log of the
    odds ratio (1 - lam) 2^(k-n) / P(d) against ``lr_thr``.

    stats = [primaries, q_t, q_c, traced, case_a, case_b, case_c,
             pd_evals, ps_evals, early_stop, lambda_evals, nonfinite]

    ``nonfinite`` counts P_d or stop-test evaluations that came out NaN/inf.
    """
    W = base.shape[0]
    r = pri.shape[0]
    ncap = ext_cum.shape[0] - 1
    rho = min(rho, r)
    best = base.copy()
    d_min = np.inf
    log_lmax = -np.inf
    stats = np.zeros(12, dtype=np.int64)
    acc = np.zeros((rho + 1, W), dtype=np.uint64)
    asum = np.zeros(rho + 1, dtype=np.float64)
    idx = np.zeros(rho + 1, dtype=np.int64)
    cw = np.zeros(W, dtype=np.uint64)
    cap_trace = trace.shape[0]
    for w in range(rho + 1):
        for d in range(w):
            idx[d] = d
        for q in range(W):
            acc[0, q] = base[q]
        for d in range(w):
            asum[d + 1] = asum[d] + alpha_pri[idx[d]]
            for q in range(W):
                acc[d + 1, q] = acc[d, q] ^ pri[idx[d], q]
        while True:
            npri = stats[0]
            stats[0] += 1
            lpri = lpri0 - k4 * asum[w]
            if shortcuts and lpri <= log_lmax:
                stats[4] += 1
            else:
                we = 0
                for q in range(W):
                    we += popcount64((acc[w, q] ^ y[q]) & pmask[q])
                if we <= tau:
                    stats[1] += 1
                    cap = xi - we
                    if cap >= 0:
                        if cap > ncap:
                            cap = ncap
                        for j in range(ext_cum[cap]):
                            stats[10] += 1
                            llam = lpri + lext0 - k4 * ext_asum[j]
                            if shortcuts and llam <= log_lmax:
                                stats[5] += 1
                                continue
                            lam = math.exp(llam)
                            ddot = asum[w] + ext_asum[j]
                            stats[7] += 1
                            pd = promising(lam, d_min, ddot, ep_alpha, cdf_a, cdf_b)
                            if not math.isfinite(pd):
                                stats[11] += 1
                            if pd <= pd_thr:
                                stats[6] += 1
                                if llam > log_lmax:
                                    log_lmax = llam
                                continue
                            for q in range(W):
                                cw[q] = acc[w, q] ^ ext[j, q]
                            s = _whd(cw, y, table)
                            if stats[3] < cap_trace:
                                trace[stats[3], 0] = npri
                                trace[stats[3], 1] = j
                                stats[3] += 1
                            stats[2] += 1
                            if s < d_min:
                                d_min = s
                                for q in range(W):
                                    best[q] = cw[q]
                                stats[8] += 1
                                if lam >= 1.0:
                                    lr = -np.inf
                                else:
                                    lr = math.log1p(-lam) + logc - (s0_all - k4 * s)
                                    if not math.isfinite(lr):
                                        stats[11] += 1
                                if lr <= lr_thr:
                                    stats[9] = 1
                                    return best, d_min, stats
            d = w - 1
            while d >= 0 and idx[d] == r - w + d:
                d -= 1
            if d < 0:
                break
            idx[d] += 1
            for e in range(d + 1, w):
                idx[e] = idx[e - 1] + 1
            for e in range(d, w):
                asum[e + 1] = asum[e] + alpha_pri[idx[e]]
                for q in range(W):
                    acc[e + 1, q] = acc[e, q] ^ pri[idx[e], q]
    return best, d_min, stats
