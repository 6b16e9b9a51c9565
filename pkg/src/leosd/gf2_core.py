"""Binary linear algebra over GF(2).

Public functions take and return uint8 arrays of 0/1 entries; internally
products are evaluated on rows packed into uint64 words.  ``BitVector`` and
``BitMatrix`` are thin immutable packed containers for callers that prefer
an object API.

Permutations are index arrays with the convention ``apply_perm(v, p) ==
v[p]``, i.e. ``v @ Pi`` where column ``j`` of ``Pi`` is the unit vector at
``p[j]``.  Column permutation of a matrix is ``A[:, p]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import get_kernels

__all__ = [
    "BitMatrix",
    "BitVector",
    "GeResult",
    "apply_perm",
    "as_bits",
    "compose_perm",
    "ge_systematic",
    "invert_perm",
    "is_permutation",
    "mat_mul",
    "mat_vec_mul",
    "n_words",
    "pack_bits",
    "rank",
    "unpack_bits",
    "vec_mat_mul",
    "weight",
    "xor",
]


def n_words(n: int) -> int:
    return max(1, (n + 63) // 64)


def as_bits(a, ndim: int | None = None) -> np.ndarray:
    """Coerce to a uint8 array of 0/1 values, rejecting anything else."""
    if isinstance(a, (BitVector, BitMatrix)):
        return a.to_array()
    arr = np.asarray(a)
    if arr.dtype == bool:
        arr = arr.astype(np.uint8)
    elif arr.size and (arr.min() < 0 or arr.max() > 1):
        raise ValueError("entries must be 0 or 1")
    arr = arr.astype(np.uint8, copy=False)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d bit array, got shape {arr.shape}")
    return arr


def pack_bits(a: np.ndarray) -> np.ndarray:
    """Pack the last axis of a 0/1 array into little-endian uint64 words."""
    a = np.asarray(a, dtype=np.uint8)
    n = a.shape[-1]
    W = n_words(n)
    padded = np.zeros(a.shape[:-1] + (W * 64,), dtype=np.uint8)
    padded[..., :n] = a
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype=np.uint64)
    raw = words.astype("<u8", copy=False).view(np.uint8)
    return np.unpackbits(raw, axis=-1, bitorder="little")[..., :n]


def _parity(x: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(x).sum(axis=-1) & 1).astype(np.uint8)


def mat_vec_mul(A, v) -> np.ndarray:
    """A · v^T over GF(2); returns a vector of length rows(A)."""
    A = as_bits(A, 2)
    v = as_bits(v, 1)
    if A.shape[1] != v.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape} · ({v.shape[0]},)")
    return _parity(pack_bits(A) & pack_bits(v))


def vec_mat_mul(v, A) -> np.ndarray:
    """Row vector times matrix, v · A."""
    A = as_bits(A, 2)
    return mat_vec_mul(A.T, v)


def mat_mul(A, B) -> np.ndarray:
    A = as_bits(A, 2)
    B = as_bits(B, 2)
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape} · {B.shape}")
    pa = pack_bits(A)
    pb = pack_bits(np.ascontiguousarray(B.T))
    return _parity(pa[:, None, :] & pb[None, :, :])


def xor(u, v) -> np.ndarray:
    u = as_bits(u)
    v = as_bits(v)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    return u ^ v


def weight(v) -> int:
    return int(np.count_nonzero(as_bits(v)))


def is_permutation(p) -> bool:
    p = np.asarray(p)
    return p.ndim == 1 and np.array_equal(np.sort(p), np.arange(p.shape[0]))


def apply_perm(v, p) -> np.ndarray:
    """v · Pi, i.e. ``v[p]`` along the last axis."""
    v = np.asarray(v)
    p = np.asarray(p)
    if v.shape[-1] != p.shape[0]:
        raise ValueError(f"length mismatch: {v.shape[-1]} vs permutation of {p.shape[0]}")
    return v[..., p]


def invert_perm(p) -> np.ndarray:
    p = np.asarray(p, dtype=np.int64)
    if not is_permutation(p):
        raise ValueError("not a permutation")
    inv = np.empty_like(p)
    inv[p] = np.arange(p.shape[0])
    return inv


def compose_perm(p, q) -> np.ndarray:
    """Permutation equal to applying ``p`` then ``q``: v[p][q] == v[compose(p, q)]."""
    return np.asarray(p)[np.asarray(q)]


@dataclass(frozen=True)
class GeResult:
    """E · A[:, perm] == R, with R in reduced echelon form."""

    E: np.ndarray
    perm: np.ndarray
    rank: int
    R: np.ndarray


def ge_systematic(A, track: bool = True) -> GeResult:
    """Gauss-Jordan elimination with nearest-right column swaps.

    The leading ``rank`` x ``rank`` block of R is the identity and rows at or
    below ``rank`` are zero.  With ``track=False`` the row-operation matrix is
    not accumulated and ``E`` is returned as ``None``.
    """
    A = as_bits(A, 2)
    if A.size == 0:
        raise ValueError("ge_systematic needs a nonempty matrix")
    R, E, perm, r = get_kernels().ge_reduce(np.ascontiguousarray(A), track)
    return GeResult(E=E if track else None, perm=np.asarray(perm, dtype=np.int64),
                    rank=int(r), R=R)


def rank(A) -> int:
    return ge_systematic(A, track=False).rank


class BitVector:
    """Immutable packed bit vector."""

    __slots__ = ("len", "words")

    def __init__(self, length: int, words: np.ndarray):
        self.len = int(length)
        w = np.array(words, dtype=np.uint64)
        w.setflags(write=False)
        self.words = w

    @classmethod
    def from_array(cls, bits) -> "BitVector":
        b = as_bits(bits, 1)
        return cls(b.shape[0], pack_bits(b))

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, np.zeros(n_words(length), dtype=np.uint64))

    def to_array(self) -> np.ndarray:
        return unpack_bits(self.words, self.len)

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def __len__(self) -> int:
        return self.len

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.len != other.len:
            raise ValueError("length mismatch")
        return BitVector(self.len, self.words ^ other.words)

    def __eq__(self, other) -> bool:
        return isinstance(other, BitVector) and self.len == other.len and \
            bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.len, self.words.tobytes()))

    def permute(self, p) -> "BitVector":
        return BitVector.from_array(apply_perm(self.to_array(), p))

    def __repr__(self) -> str:
        return f"BitVector({''.join(map(str, self.to_array()))})"


class BitMatrix:
    """Immutable packed bit matrix, row-major."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        self.rows = int(rows)
        self.cols = int(cols)
        w = np.array(words, dtype=np.uint64).reshape(self.rows, n_words(self.cols))
        w.setflags(write=False)
        self.words = w

    @classmethod
    def from_array(cls, bits) -> "BitMatrix":
        b = as_bits(bits, 2)
        return cls(b.shape[0], b.shape[1], pack_bits(b))

    @classmethod
    def identity(cls, size: int) -> "BitMatrix":
        return cls.from_array(np.eye(size, dtype=np.uint8))

    def to_array(self) -> np.ndarray:
        return unpack_bits(self.words, self.cols).reshape(self.rows, self.cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def T(self) -> "BitMatrix":
        return BitMatrix.from_array(np.ascontiguousarray(self.to_array().T))

    def rank(self) -> int:
        return rank(self.to_array()) if self.rows and self.cols else 0

    def __matmul__(self, other):
        if isinstance(other, BitVector):
            return BitVector.from_array(mat_vec_mul(self.to_array(), other.to_array()))
        return BitMatrix.from_array(mat_mul(self.to_array(), as_bits(other, 2)))

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return BitMatrix(self.rows, self.cols, self.words ^ other.words)

    def __eq__(self, other) -> bool:
        return isinstance(other, BitMatrix) and self.shape == other.shape and \
            bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"
