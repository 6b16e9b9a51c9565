import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from leosd.gf2_core import (BitMatrix, BitVector, apply_perm, as_bits, compose_perm, ge_systematic,
                            invert_perm, is_permutation, mat_mul, mat_vec_mul, pack_bits, rank,
                            unpack_bits, vec_mat_mul, weight, xor)


def int_rank(A):
    """Rank over GF(2) with rows held as Python ints (independent of the package)."""
    rows = [int("".join(map(str, r[::-1])) or "0", 2) for r in np.asarray(A, dtype=int)]
    r = 0
    for bit in range(np.asarray(A).shape[1]):
        piv = next((i for i in range(r, len(rows)) if rows[i] >> bit & 1), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] >> bit & 1:
                rows[i] ^= rows[r]
        r += 1
    return r


def mod2(A, B):
    return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64)) % 2


bit_matrices = st.tuples(st.integers(1, 64), st.integers(1, 64)).flatmap(
    lambda s: arrays(np.uint8, s, elements=st.integers(0, 1)))


def test_small_fixture():
    A = np.array([[1, 1, 0], [1, 1, 1]], dtype=np.uint8)
    g = ge_systematic(A)
    assert g.rank == 2
    assert g.perm.tolist() == [0, 2, 1]
    assert g.R.tolist() == [[1, 0, 1], [0, 1, 0]]
    assert g.E.tolist() == [[1, 0], [1, 1]]
    assert np.array_equal(mod2(g.E, A[:, g.perm]), g.R)


@settings(max_examples=1000)
@given(bit_matrices)
def test_ge_properties(A):
    g = ge_systematic(A)
    m, n = A.shape
    r = g.rank
    assert r == int_rank(A)
    assert is_permutation(g.perm) and len(g.perm) == n
    assert np.array_equal(mod2(g.E, A[:, g.perm]), g.R)
    assert int_rank(g.E) == m
    assert np.array_equal(g.R[:r, :r], np.eye(r, dtype=np.uint8))
    assert not g.R[r:].any()


@settings(max_examples=200)
@given(bit_matrices)
def test_untracked_matches_tracked(A):
    a, b = ge_systematic(A, track=False), ge_systematic(A)
    assert a.E is None
    assert a.rank == b.rank and np.array_equal(a.R, b.R) and np.array_equal(a.perm, b.perm)


def test_ge_rejects_empty_and_non_binary():
    with pytest.raises(ValueError):
        ge_systematic(np.zeros((0, 3), dtype=np.uint8))
    with pytest.raises(ValueError):
        ge_systematic(np.array([[2, 0]]))


def test_identity_and_zero():
    assert rank(np.eye(7, dtype=np.uint8)) == 7
    assert rank(np.zeros((3, 5), dtype=np.uint8)) == 0


@settings(max_examples=200)
@given(st.integers(1, 200).flatmap(lambda n: arrays(np.uint8, n, elements=st.integers(0, 1))))
def test_pack_roundtrip(v):
    w = pack_bits(v)
    assert w.dtype == np.uint64 and w.shape[-1] == (len(v) + 63) // 64
    assert np.array_equal(unpack_bits(w, len(v)), v)
    assert weight(v) == int(v.sum())


def test_mat_vec_bit_serial():
    rng = np.random.default_rng(3)
    for _ in range(50):
        A = rng.integers(0, 2, (4, 4), dtype=np.uint8)
        v = rng.integers(0, 2, 4, dtype=np.uint8)
        serial = [0] * 4
        for i in range(4):
            for j in range(4):
                serial[i] ^= int(A[i, j]) & int(v[j])
        assert mat_vec_mul(A, v).tolist() == serial


@settings(max_examples=200)
@given(st.integers(1, 70), st.integers(1, 70), st.integers(1, 70), st.integers(0, 2**32 - 1))
def test_products_match_integer_arithmetic(m, k, n, seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, 2, (m, k), dtype=np.uint8)
    B = rng.integers(0, 2, (k, n), dtype=np.uint8)
    v = rng.integers(0, 2, k, dtype=np.uint8)
    u = rng.integers(0, 2, m, dtype=np.uint8)
    assert np.array_equal(mat_mul(A, B), mod2(A, B))
    assert np.array_equal(mat_vec_mul(A, v), mod2(A, v))
    assert np.array_equal(vec_mat_mul(u, A), mod2(u, A))


def test_xor_and_shapes():
    assert xor([1, 0, 1], [1, 1, 0]).tolist() == [0, 1, 1]
    with pytest.raises(ValueError):
        xor([1, 0], [1, 0, 1])
    with pytest.raises(ValueError):
        as_bits([[1, 0]], 1)


@settings(max_examples=200)
@given(st.permutations(list(range(12))), st.permutations(list(range(12))))
def test_permutations(p, q):
    p, q = np.array(p), np.array(q)
    v = np.arange(12) * 3
    assert np.array_equal(apply_perm(apply_perm(v, p), invert_perm(p)), v)
    assert np.array_equal(apply_perm(apply_perm(v, p), q), apply_perm(v, compose_perm(p, q)))


def test_is_permutation():
    assert is_permutation([2, 0, 1])
    assert not is_permutation([0, 0, 1])
    with pytest.raises(ValueError):
        invert_perm([0, 2])


def test_bitvector_and_bitmatrix():
    rng = np.random.default_rng(5)
    a = rng.integers(0, 2, 70, dtype=np.uint8)
    b = rng.integers(0, 2, 70, dtype=np.uint8)
    va, vb = BitVector.from_array(a), BitVector.from_array(b)
    assert (va ^ vb).to_array().tolist() == (a ^ b).tolist()
    assert va.weight() == int(a.sum()) and len(va) == 70
    assert va == BitVector.from_array(a.copy()) and hash(va) == hash(BitVector.from_array(a))
    assert BitVector.zeros(9).weight() == 0
    A = rng.integers(0, 2, (5, 70), dtype=np.uint8)
    M = BitMatrix.from_array(A)
    assert M.shape == (5, 70)
    assert np.array_equal(M.T.to_array(), A.T)
    assert M.rank() == int_rank(A)
    assert np.array_equal((M @ M.T).to_array(), mod2(A, A.T))
    assert np.array_equal((M @ vb).to_array(), mod2(A, b))
    assert BitMatrix.identity(4).rank() == 4
