"""Exhaustive reference implementations for small codes.

Nothing here is fast; these functions exist so tests can compare the decoders
against definitionally correct answers.
"""
from __future__ import annotations

from itertools import product

import numpy as np

from .channel import ReceivedFrame
from .codes import LinearCode, all_codewords
from .gf2_core import BitVector, as_bits, rank
from .leosd import Preprocessed
from .osd_baseline import DecodeOutcome, OpCounters, whd

__all__ = ["ML_MAX_K", "SLE_MAX_K", "TEP_MAX_NK", "ml_decode", "sle_enumerate", "valid_tep_set"]

ML_MAX_K = 20
SLE_MAX_K = 16
TEP_MAX_NK = 16


def ml_decode(frame: ReceivedFrame, code: LinearCode) -> DecodeOutcome:
    """Maximum-likelihood decoding by scanning all 2^k codewords (first minimiser wins)."""
    if code.k > ML_MAX_K:
        raise ValueError(f"ml_decode needs k <= {ML_MAX_K}, got {code.k}")
    if frame.n != code.n:
        raise ValueError("frame length does not match the code")
    cw = all_codewords(code)
    d = (cw != frame.y[None, :]) @ frame.alpha
    i = int(np.argmin(d))
    c = cw[i].copy()
    q = cw.shape[0]
    return DecodeOutcome(c, whd(c, frame.y, frame.alpha), q, q, OpCounters(),
                         info={"index": i})


def _all_vectors(length: int) -> np.ndarray:
    """Every binary vector of the given length, row i holding the bits of i."""
    idx = np.arange(1 << length, dtype=np.int64)
    return ((idx[:, None] >> np.arange(length)) & 1).astype(np.uint8)


def sle_enumerate(PT, target) -> list[np.ndarray]:
    """Every x with PT x^T = target^T, by trying all 2^k candidates."""
    PT = as_bits(PT, 2)
    t = target.to_array() if isinstance(target, BitVector) else as_bits(target, 1)
    rows, k = PT.shape
    if k > SLE_MAX_K:
        raise ValueError(f"sle_enumerate needs k <= {SLE_MAX_K}, got {k}")
    if t.shape != (rows,):
        raise ValueError("target length must equal the number of equations")
    X = _all_vectors(k)
    img = (X.astype(np.int64) @ PT.T.astype(np.int64)) & 1
    hit = np.all(img == t[None, :], axis=1)
    return [X[i].copy() for i in np.flatnonzero(hit)]


def valid_tep_set(pre: Preprocessed) -> set[BitVector]:
    """All TEPs e over the parity segment whose system x P~ = y~_P + e is consistent."""
    nk = pre.n - pre.k
    if nk > TEP_MAX_NK:
        raise ValueError(f"valid_tep_set needs n-k <= {TEP_MAX_NK}, got {nk}")
    PT = pre.P.T
    out = set()
    for bits in product((0, 1), repeat=nk):
        e = np.array(bits, dtype=np.uint8)
        aug = np.hstack([PT, (pre.y_P ^ e)[:, None]])
        if rank(aug) == pre.r_P:
            out.add(BitVector.from_array(e))
    return out

