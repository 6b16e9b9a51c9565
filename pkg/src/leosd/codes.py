"""Binary linear block codes: extended BCH construction, random codes, file IO."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .gf2_core import as_bits, ge_systematic, invert_perm, mat_mul, rank, vec_mat_mul

__all__ = [
    "BUILTIN_CODES",
    "PRIMITIVE_POLYS",
    "Gf2mField",
    "LinearCode",
    "all_codewords",
    "build_ebch",
    "build_ebch_k",
    "builtin_code",
    "cyclotomic_cosets",
    "encode",
    "encode_many",
    "load_code",
    "min_distance_bruteforce",
    "parity_check_from_generator",
    "random_code",
    "save_code",
]

# polynomial basis, bit i = coefficient of x^i
PRIMITIVE_POLYS = {
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
    7: 0b10001001,  # x^7 + x^3 + 1
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
}

# name -> (m, k, true minimum distance of the extended code)
BUILTIN_CODES = {
    "ebch8_4": (3, 4, 4),
    "ebch64_30": (6, 30, 14),
    "ebch64_16": (6, 16, 24),
    "ebch128_85": (7, 85, 14),
    "ebch128_50": (7, 50, 28),
    "ebch128_78": (7, 78, 16),
}


@dataclass(frozen=True, eq=False)
class LinearCode:
    n: int
    k: int
    G: np.ndarray
    H: np.ndarray | None = None
    d_min: int | None = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        G = as_bits(self.G, 2)
        if G.shape != (self.k, self.n):
            raise ValueError(f"G has shape {G.shape}, expected ({self.k}, {self.n})")
        if not 0 < self.k <= self.n:
            raise ValueError(f"need 0 < k <= n, got k={self.k}, n={self.n}")
        G = G.copy()
        G.setflags(write=False)
        object.__setattr__(self, "G", G)
        if self.H is not None:
            H = as_bits(self.H, 2).copy()
            if H.shape != (self.n - self.k, self.n):
                raise ValueError(f"H has shape {H.shape}, expected ({self.n - self.k}, {self.n})")
            H.setflags(write=False)
            object.__setattr__(self, "H", H)

    @property
    def rate(self) -> float:
        return self.k / self.n

    def with_parity_check(self) -> "LinearCode":
        if self.H is not None:
            return self
        return LinearCode(self.n, self.k, self.G, parity_check_from_generator(self.G),
                          self.d_min, self.name, dict(self.meta))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearCode):
            return NotImplemented
        same_h = (self.H is None and other.H is None) or (
            self.H is not None and other.H is not None and np.array_equal(self.H, other.H))
        return self.n == other.n and self.k == other.k and \
            np.array_equal(self.G, other.G) and same_h

    def __repr__(self) -> str:
        d = f", d={self.d_min}" if self.d_min is not None else ""
        label = f"{self.name} " if self.name else ""
        return f"<LinearCode {label}({self.n},{self.k}{d})>"


def encode(code: LinearCode, b) -> np.ndarray:
    b = as_bits(b, 1)
    if b.shape[0] != code.k:
        raise ValueError(f"message length {b.shape[0]} != k={code.k}")
    return vec_mat_mul(b, code.G)


def encode_many(code: LinearCode, B) -> np.ndarray:
    B = np.asarray(B, dtype=np.int64)
    return ((B @ code.G.astype(np.int64)) & 1).astype(np.uint8)


def parity_check_from_generator(G) -> np.ndarray:
    """An (n-k) x n parity-check matrix for a full-rank generator."""
    G = as_bits(G, 2)
    k, n = G.shape
    ge = ge_systematic(G, track=False)
    if ge.rank != k:
        raise ValueError("generator matrix is rank deficient")
    P = ge.R[:, k:]
    Hp = np.concatenate([P.T, np.eye(n - k, dtype=np.uint8)], axis=1)
    return np.ascontiguousarray(Hp[:, invert_perm(ge.perm)])


class Gf2mField:
    """GF(2^m) with elements as ints in the polynomial basis."""

    def __init__(self, m: int, poly: int | None = None):
        if not 2 <= m <= 16:
            raise ValueError("field degree must be in [2, 16]")
        self.m = m
        self.poly = PRIMITIVE_POLYS[m] if poly is None else poly
        self.order = 1 << m
        q = self.order - 1
        exp = np.zeros(2 * q, dtype=np.int64)
        log = np.full(self.order, -1, dtype=np.int64)
        x = 1
        for i in range(q):
            if log[x] != -1:
                raise ValueError(f"polynomial {self.poly:#b} is not primitive")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.order:
                x ^= self.poly
        if x != 1:
            raise ValueError(f"polynomial {self.poly:#b} is not primitive")
        exp[q:] = exp[:q]
        self.exp = exp
        self.log = log

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def alpha_pow(self, e: int) -> int:
        return int(self.exp[e % (self.order - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self.exp[(self.order - 1 - self.log[a]) % (self.order - 1)])

    def minimal_poly(self, s: int) -> int:
        """Minimal polynomial of alpha^s over GF(2) as a bitmask."""
        coset = _coset(s, self.order - 1)
        poly = [1]  # coefficients in GF(2^m), lowest degree first
        for j in coset:
            root = self.alpha_pow(j)
            nxt = [0] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i + 1] ^= c
                nxt[i] ^= self.mul(c, root)
            poly = nxt
        out = 0
        for i, c in enumerate(poly):
            if c not in (0, 1):
                raise ArithmeticError("minimal polynomial left GF(2)")
            out |= c << i
        return out


def _coset(s: int, q: int) -> list[int]:
    out = []
    j = s % q
    while j not in out:
        out.append(j)
        j = (2 * j) % q
    return out


def cyclotomic_cosets(m: int) -> list[list[int]]:
    q = (1 << m) - 1
    seen: set[int] = set()
    cosets = []
    for s in range(q):
        if s not in seen:
            c = _coset(s, q)
            seen.update(c)
            cosets.append(c)
    return cosets


def _poly_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def _bch_generator(m: int, t: int) -> int:
    field_ = Gf2mField(m)
    q = field_.order - 1
    g = 1
    done: set[int] = set()
    for s in range(1, 2 * t + 1):
        if s % q in done:
            continue
        done.update(_coset(s, q))
        g = _poly_mul(g, field_.minimal_poly(s))
    return g


def build_ebch(m: int, t: int) -> LinearCode:
    """Extended BCH code of length 2^m with designed distance 2t + 1."""
    if not 3 <= m <= 8:
        raise ValueError("field degree m must be in [3, 8]")
    if t < 1:
        raise ValueError("t must be positive")
    N = (1 << m) - 1
    g = _bch_generator(m, t)
    deg = g.bit_length() - 1
    k = N - deg
    if k <= 0:
        raise ValueError(f"t={t} leaves no information bits for m={m}")
    gbits = np.array([(g >> i) & 1 for i in range(deg + 1)], dtype=np.uint8)
    G = np.zeros((k, N + 1), dtype=np.uint8)
    for i in range(k):
        G[i, i:i + deg + 1] = gbits
    G[:, N] = G[:, :N].sum(axis=1) & 1
    d = None
    for name, (mm, kk, dd) in BUILTIN_CODES.items():
        if mm == m and kk == k:
            d = dd
    return LinearCode(N + 1, k, G, parity_check_from_generator(G), d,
                      name=f"ebch{N + 1}_{k}", meta={"m": m, "t": t, "g": g})


def build_ebch_k(m: int, target_k: int) -> LinearCode:
    """Sweep the designed distance upward until the dimension equals target_k."""
    N = (1 << m) - 1
    for t in range(1, N // 2 + 1):
        deg = _bch_generator(m, t).bit_length() - 1
        if N - deg == target_k:
            return build_ebch(m, t)
        if N - deg < target_k:
            break
    raise ValueError(f"no extended BCH code of length {N + 1} with k={target_k}")


def builtin_code(name: str) -> LinearCode:
    if name not in BUILTIN_CODES:
        raise KeyError(f"unknown builtin code {name!r}; choose from {sorted(BUILTIN_CODES)}")
    m, k, _ = BUILTIN_CODES[name]
    return build_ebch_k(m, k)


def random_code(n: int, k: int, seed) -> LinearCode:
    """Random generator matrix with i.i.d. uniform bits, redrawn until full rank."""
    if not 0 < k < n:
        raise ValueError("need 0 < k < n")
    rng = np.random.default_rng(seed)
    while True:
        G = rng.integers(0, 2, size=(k, n), dtype=np.uint8)
        if rank(G) == k:
            return LinearCode(n, k, G, parity_check_from_generator(G),
                              name=f"random{n}_{k}", meta={"seed": seed})


def save_code(code: LinearCode, path) -> None:
    lines = [f"{code.k} {code.n}"]
    lines += ["".join(map(str, row)) for row in code.G]
    if code.H is not None:
        lines.append("H")
        lines += ["".join(map(str, row)) for row in code.H]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_rows(lines: list[str], count: int, n: int, what: str) -> np.ndarray:
    if len(lines) < count:
        raise ValueError(f"expected {count} rows of {what}, found {len(lines)}")
    out = np.zeros((count, n), dtype=np.uint8)
    for i, line in enumerate(lines[:count]):
        if len(line) != n or set(line) - {"0", "1"}:
            raise ValueError(f"row {i} of {what} must be {n} characters from {{0,1}}")
        out[i] = np.frombuffer(line.encode(), dtype=np.uint8) - ord("0")
    return out


def load_code(path) -> LinearCode:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln.strip() for ln in text.splitlines()]
    while lines and not lines[-1]:
        lines.pop()
    if not lines:
        raise ValueError("empty code file")
    head = lines[0].split()
    if len(head) != 2 or not all(h.isdigit() for h in head):
        raise ValueError(f"malformed header {lines[0]!r}; expected 'k n'")
    k, n = map(int, head)
    if not 0 < k <= n:
        raise ValueError(f"header needs 0 < k <= n, got k={k}, n={n}")
    G = _parse_rows(lines[1:], k, n, "G")
    rest = lines[1 + k:]
    H = None
    if rest:
        if rest[0] != "H":
            raise ValueError("unexpected content after G (expected 'H' sentinel)")
        H = _parse_rows(rest[1:], n - k, n, "H")
        if len(rest) > 1 + n - k:
            raise ValueError("trailing content after H")
    if rank(G) != k:
        raise ValueError("generator matrix is rank deficient")
    if H is not None and mat_mul(G, H.T).any():
        raise ValueError("G and H are not orthogonal")
    return LinearCode(n, k, G, H, name=Path(path).stem)


def all_codewords(code: LinearCode, packed: bool = False) -> np.ndarray:
    """All 2^k codewords; row i is the encoding of the bits of i (bit j = message bit j)."""
    if code.k > 20:
        raise ValueError("exhaustive codebook limited to k <= 20")
    from .gf2_core import pack_bits, unpack_bits

    rows = pack_bits(code.G)
    W = rows.shape[1]
    cw = np.zeros((1 << code.k, W), dtype=np.uint64)
    for i in range(code.k):
        half = 1 << i
        cw[half:2 * half] = cw[:half] ^ rows[i]
    return cw if packed else unpack_bits(cw, code.n)


def min_distance_bruteforce(code: LinearCode) -> int:
    if code.k > 20:
        raise ValueError("brute-force minimum distance limited to k <= 20")
    cw = all_codewords(code, packed=True)
    return int(np.bitwise_count(cw[1:]).sum(axis=1).min())
