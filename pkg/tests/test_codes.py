import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leosd.codes import (BUILTIN_CODES, Gf2mField, LinearCode, all_codewords, build_ebch, build_ebch_k,
                         builtin_code, cyclotomic_cosets, encode, encode_many, load_code,
                         min_distance_bruteforce, parity_check_from_generator, random_code, save_code)
from leosd.gf2_core import rank


def poly_mod(a, b):
    db = b.bit_length() - 1
    while a and a.bit_length() - 1 >= db:
        a ^= b << (a.bit_length() - 1 - db)
    return a


def poly_eval(field, poly, x):
    acc, i = 0, 0
    while poly >> i:
        if poly >> i & 1:
            acc ^= field.alpha_pow(field.log[x] * i) if x else (1 if i == 0 else 0)
        i += 1
    return acc


@pytest.mark.parametrize("m,t,g", [(4, 2, 0b111010001), (4, 3, 0b10100110111), (3, 1, 0b1011)])
def test_known_bch_generators(m, t, g):
    code = build_ebch(m, t)
    assert code.meta["g"] == g
    N = (1 << m) - 1
    assert poly_mod((1 << N) | 1, g) == 0
    f = Gf2mField(m)
    for i in range(1, 2 * t + 1):
        assert poly_eval(f, g, f.alpha_pow(i)) == 0


@pytest.mark.parametrize("name", sorted(BUILTIN_CODES))
def test_builtin_dimensions_and_checks(name):
    m, k, d = BUILTIN_CODES[name]
    code = builtin_code(name)
    assert (code.n, code.k, code.d_min) == (1 << m, k, d)
    assert rank(code.G) == k
    assert not ((code.G.astype(int) @ code.H.T.astype(int)) % 2).any()
    assert (code.G.sum(axis=1) % 2 == 0).all()  # extended: even weight


def test_encode_satisfies_parity(ebch64_30):
    rng = np.random.default_rng(1)
    B = rng.integers(0, 2, (200, 30), dtype=np.uint8)
    C = encode_many(ebch64_30, B)
    assert not ((C.astype(int) @ ebch64_30.H.T.astype(int)) % 2).any()
    assert np.array_equal(C[0], encode(ebch64_30, B[0]))
    with pytest.raises(ValueError):
        encode(ebch64_30, B[0, :5])


def test_sampled_weights_of_64_30(ebch64_30):
    rng = np.random.default_rng(2)
    C = encode_many(ebch64_30, rng.integers(0, 2, (5000, 30)))
    w = C.sum(axis=1)
    w = w[w > 0]
    assert w.min() >= 14 and not (w % 2).any()


def test_exhaustive_minimum_distances(ebch8_4):
    assert min_distance_bruteforce(ebch8_4) == 4
    assert min_distance_bruteforce(builtin_code("ebch64_16")) == 24


def test_all_codewords_is_the_codebook(ebch8_4):
    cw = all_codewords(ebch8_4)
    assert cw.shape == (16, 8)
    assert len({tuple(r) for r in cw}) == 16
    for i in range(16):
        msg = np.array([(i >> j) & 1 for j in range(4)], dtype=np.uint8)
        assert np.array_equal(cw[i], encode(ebch8_4, msg))


def test_cyclotomic_cosets_partition():
    for m in range(3, 9):
        q = (1 << m) - 1
        cs = cyclotomic_cosets(m)
        flat = sorted(x for c in cs for x in c)
        assert flat == list(range(q))
        for c in cs:
            assert m % len(c) == 0


@settings(max_examples=300)
@given(st.integers(3, 8), st.data())
def test_field_axioms(m, data):
    f = Gf2mField(m)
    a, b, c = (data.draw(st.integers(0, f.order - 1)) for _ in range(3))
    assert f.mul(a, b) == f.mul(b, a)
    assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
    assert f.mul(a, b ^ c) == f.mul(a, b) ^ f.mul(a, c)
    if a:
        assert f.mul(a, f.inv(a)) == 1


def test_minimal_polynomials_vanish():
    f = Gf2mField(6)
    for s in (1, 3, 5, 7, 9):
        mp = f.minimal_poly(s)
        assert poly_eval(f, mp, f.alpha_pow(s)) == 0
        assert poly_mod((1 << 63) | 1, mp) == 0


def test_non_primitive_rejected():
    with pytest.raises(ValueError):
        Gf2mField(4, 0b11111)


def test_build_errors():
    with pytest.raises(ValueError):
        build_ebch(9, 1)
    with pytest.raises(ValueError):
        build_ebch_k(6, 31)
    with pytest.raises(KeyError):
        builtin_code("nope")


def test_random_code_and_parity_check():
    code = random_code(20, 9, 4)
    assert rank(code.G) == 9
    H = parity_check_from_generator(code.G)
    assert H.shape == (11, 20) and rank(H) == 11
    assert not ((code.G.astype(int) @ H.T.astype(int)) % 2).any()
    assert random_code(20, 9, 4) == code


def test_full_rank_fraction_of_random_square_blocks():
    rng = np.random.default_rng(7)
    k, trials = 6, 4000
    hits = sum(rank(rng.integers(0, 2, (k, k), dtype=np.uint8)) == k for _ in range(trials))
    p = np.prod([1 - 2.0 ** -i for i in range(1, k + 1)])
    sd = np.sqrt(p * (1 - p) / trials)
    assert abs(hits / trials - p) < 4 * sd


def test_file_roundtrip(tmp_path, ebch8_4):
    path = tmp_path / "c.txt"
    save_code(ebch8_4, path)
    back = load_code(path)
    assert back == ebch8_4


def test_handwritten_file(tmp_path):
    path = tmp_path / "h.txt"
    path.write_text("2 4\n1011\n0101\n")
    code = load_code(path)
    assert code.G.tolist() == [[1, 0, 1, 1], [0, 1, 0, 1]]
    assert code.H is None


@pytest.mark.parametrize("text", ["", "2\n1011\n", "2 4\n1021\n0101\n", "2 4\n1011\n", "2 4\n1011\n1011\n",
                                  "2 4\n1011\n0101\nX\n", "2 4\n1011\n0101\nH\n1111\n1010\n"])
def test_malformed_files(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(ValueError):
        load_code(path)


def test_linear_code_validation():
    with pytest.raises(ValueError):
        LinearCode(4, 2, np.zeros((3, 4), dtype=np.uint8))
    with pytest.raises(ValueError):
        LinearCode(4, 2, np.eye(2, 4, dtype=np.uint8), H=np.zeros((1, 4), dtype=np.uint8))
