"""Order-m ordered-statistics decoding (the reference decoder)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import get_kernels
from .channel import ReceivedFrame, sort_descending
from .codes import LinearCode
from .gf2_core import as_bits, ge_systematic, pack_bits, unpack_bits

__all__ = ["DecodeOutcome", "OpCounters", "c_ge", "decode_osd", "osd_estimates", "whd"]


@dataclass
class OpCounters:
    """Binary (BOP) and floating-point (FLOP) operation tallies."""

    bops: float = 0.0
    flops: float = 0.0

    def add(self, bops: float = 0.0, flops: float = 0.0) -> None:
        if bops < 0 or flops < 0:
            raise ValueError("counters only grow")
        self.bops += bops
        self.flops += flops

    def __add__(self, other: "OpCounters") -> "OpCounters":
        return OpCounters(self.bops + other.bops, self.flops + other.flops)


@dataclass
class DecodeOutcome:
    codeword: np.ndarray
    whd: float
    q_t: int
    q_c: int
    counters: OpCounters
    early_stop: bool = False
    info: dict = field(default_factory=dict)


def whd(c, y, alpha) -> float:
    """Weighted Hamming distance: sum of alpha where c and y disagree."""
    c = as_bits(c, 1)
    y = as_bits(y, 1)
    alpha = np.asarray(alpha, dtype=np.float64)
    if not c.shape == y.shape == alpha.shape:
        raise ValueError("c, y and alpha must have equal lengths")
    return float(alpha[c != y].sum())


def c_ge(k: int, n: int) -> float:
    """BOPs of Gaussian elimination on a k x n matrix."""
    mn = min(n, k)
    return (mn - 1) * k * n - 0.5 * (mn - 1) ** 2 * mn


def _table(alpha: np.ndarray, n: int) -> np.ndarray:
    return get_kernels().whd_table(np.ascontiguousarray(alpha, dtype=np.float64), (n + 7) // 8)


def _osd_setup(frame: ReceivedFrame, code: LinearCode):
    perm_d, _, _ = sort_descending(frame)
    ge = ge_systematic(code.G[:, perm_d], track=False)
    if ge.rank != code.k:
        raise ValueError("generator matrix is rank deficient")
    perm_total = perm_d[ge.perm]
    return ge.R, perm_total


def decode_osd(frame: ReceivedFrame, code: LinearCode, order: int,
               trace: np.ndarray | None = None) -> DecodeOutcome:
    """Order-``order`` OSD: flip up to ``order`` most reliable basis bits and re-encode."""
    n, k = code.n, code.k
    if not 0 <= order <= k:
        raise ValueError(f"order must lie in [0, k={k}]")
    if frame.n != n:
        raise ValueError("frame length does not match the code")
    Gs, perm_total = _osd_setup(frame, code)
    yt = frame.y[perm_total]
    at = frame.alpha[perm_total]
    base = (yt[:k].astype(np.int64) @ Gs.astype(np.int64)) & 1
    kern = get_kernels()
    W = (n + 63) // 64
    ext = np.zeros((1, W), dtype=np.uint64)
    ext_cum = np.ones(1, dtype=np.int64)
    best, _, stats = kern.reprocess(
        pack_bits(base.astype(np.uint8)), pack_bits(Gs), ext, ext_cum, pack_bits(yt),
        np.zeros(W, dtype=np.uint64), _table(at, n), order, n, n,
        np.zeros((0, 2), dtype=np.int64) if trace is None else trace)
    ct = unpack_bits(best, n)
    c = np.empty(n, dtype=np.uint8)
    c[perm_total] = ct
    q = int(stats[1])
    counters = OpCounters()
    counters.add(bops=5 * n + c_ge(k, n) + q * (2 * k * n + n),
                 flops=n + n * math.log(n) + q * (n + 1))
    return DecodeOutcome(c, whd(c, frame.y, frame.alpha), q, int(stats[2]), counters,
                         info={"traced": int(stats[3])})


def osd_estimates(frame: ReceivedFrame, code: LinearCode, order: int) -> list[np.ndarray]:
    """Every order-``order`` OSD candidate in original bit order (reference path)."""
    from itertools import combinations

    n, k = code.n, code.k
    Gs, perm_total = _osd_setup(frame, code)
    yb = frame.y[perm_total][:k]
    out = []
    for w in range(order + 1):
        for S in combinations(range(k), w):
            b = yb.copy()
            b[list(S)] ^= 1
            ct = ((b.astype(np.int64) @ Gs.astype(np.int64)) & 1).astype(np.uint8)
            c = np.empty(n, dtype=np.uint8)
            c[perm_total] = ct
            out.append(c)
    return out
