"""Vectorised numpy kernels.

Same contracts and bit-identical results as the numba loops: floating-point
sums are accumulated in the same order, ties are resolved the same way.
The reprocessing kernel with decoding conditions is inherently sequential
(thresholds move after every estimate) and runs as the plain-Python loop.
"""
from __future__ import annotations

from itertools import combinations, islice

import numpy as np

from . import _loops

NAME = "numpy"

_CHUNK = 1 << 15


def ge_reduce(A, track):
    R = np.array(A, dtype=np.uint8, copy=True)
    m, n = R.shape
    E = np.eye(m, dtype=np.uint8) if track else np.zeros((m, m), dtype=np.uint8)
    perm = np.arange(n)
    rank = 0
    for r in range(min(m, n)):
        nz = R[r:, r:].any(axis=0)
        if not nz.any():
            break
        c = r + int(np.argmax(nz))
        if c != r:
            R[:, [r, c]] = R[:, [c, r]]
            perm[[r, c]] = perm[[c, r]]
        i = r + int(np.argmax(R[r:, r]))
        if i != r:
            R[[r, i]] = R[[i, r]]
            E[[r, i]] = E[[i, r]]
        rows = R[:, r].astype(bool)
        rows[r] = False
        R[rows, r:] ^= R[r, r:]
        if track:
            E[rows] ^= E[r]
        rank += 1
    return R, E, perm, rank


def whd_table(alpha, nbytes):
    a = np.zeros(nbytes * 8)
    n = min(alpha.shape[0], nbytes * 8)
    a[:n] = alpha[:n]
    a = a.reshape(nbytes, 8)
    T = np.zeros((nbytes, 256))
    for v in range(1, 256):
        low = v & -v
        T[:, v] = T[:, v ^ low] + a[:, low.bit_length() - 1]
    return T


def _whd_many(words, y, table):
    diff = (words ^ y).view(np.uint8)
    s = np.zeros(words.shape[0])
    for t in range(table.shape[0]):
        s += table[t, diff[:, t]]
    return s


def _combo_blocks(r, w):
    it = combinations(range(r), w)
    while True:
        block = list(islice(it, _CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.int64).reshape(len(block), w)


def ext_table(rows, alpha, wmax):
    s, W = rows.shape
    wmax = min(wmax, s)
    words, sums, cum = [], [], []
    total = 0
    for w in range(wmax + 1):
        for idx in _combo_blocks(s, w):
            out = np.zeros((idx.shape[0], W), dtype=np.uint64)
            a = np.zeros(idx.shape[0])
            for d in range(w):
                out ^= rows[idx[:, d]]
                a += alpha[idx[:, d]]
            words.append(out)
            sums.append(a)
            total += idx.shape[0]
        cum.append(total)
    return (np.concatenate(words), np.array(cum, dtype=np.int64),
            np.concatenate(sums))


def reprocess(base, pri, ext, ext_cum, y, pmask, table, rho, tau, xi, trace):
    W = base.shape[0]
    r = pri.shape[0]
    rho = min(rho, r)
    ncap = ext_cum.shape[0] - 1
    best = base.copy()
    best_whd = np.inf
    stats = np.zeros(4, dtype=np.int64)
    cap_trace = trace.shape[0]
    for w in range(rho + 1):
        for idx in _combo_blocks(r, w):
            M = idx.shape[0]
            words = np.broadcast_to(base, (M, W)).copy()
            for d in range(w):
                words ^= pri[idx[:, d]]
            ordinal = stats[0] + np.arange(M)
            stats[0] += M
            we = np.bitwise_count((words ^ y) & pmask).sum(axis=1, dtype=np.int64)
            keep = we <= tau
            stats[1] += int(keep.sum())
            cap = np.minimum(xi - we, ncap)
            keep &= cap >= 0
            if not keep.any():
                continue
            words, ordinal, cap = words[keep], ordinal[keep], cap[keep]
            cnt = ext_cum[cap]
            # split so that no batch materialises more than ~_CHUNK candidates
            ends = np.cumsum(cnt)
            start = 0
            while start < cnt.shape[0]:
                base_count = ends[start] - cnt[start]
                stop = int(np.searchsorted(ends, base_count + _CHUNK, side="right"))
                stop = max(stop, start + 1)
                sl = slice(start, stop)
                owners = np.repeat(ordinal[sl], cnt[sl])
                js = np.concatenate([np.arange(c) for c in cnt[sl]])
                cand = np.repeat(words[sl], cnt[sl], axis=0) ^ ext[js]
                s = _whd_many(cand, y, table)
                room = cap_trace - stats[3]
                if room > 0:
                    take = min(room, s.shape[0])
                    trace[stats[3]:stats[3] + take, 0] = owners[:take]
                    trace[stats[3]:stats[3] + take, 1] = js[:take]
                    stats[3] += take
                stats[2] += s.shape[0]
                i = int(np.argmin(s))
                if s[i] < best_whd:
                    best_whd = float(s[i])
                    best = cand[i].copy()
                start = stop
    return best, best_whd, stats


ile_reprocess = getattr(_loops.ile_reprocess, "py_func", _loops.ile_reprocess)

__all__ = ["NAME", "ext_table", "ge_reduce", "ile_reprocess", "reprocess", "whd_table"]
