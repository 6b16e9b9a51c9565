import numpy as np
import pytest

from conftest import deficient_instances, random_frames
from leosd.channel import frame_from_gamma
from leosd.codes import random_code
from leosd.gf2_core import BitVector
from leosd.leosd import tep_from_primary
from leosd.oracle import ml_decode, sle_enumerate, valid_tep_set


def test_sle_counts_on_deficient_systems():
    for code, frame, pre in deficient_instances(15, seed=1, r_p=6):
        PT = pre.P.T
        for e_bits in (np.zeros(8, dtype=np.uint8), np.eye(8, dtype=np.uint8)[3]):
            sols = sle_enumerate(PT, pre.y_P ^ e_bits)
            assert len(sols) in (0, 2 ** (8 - pre.r_P))
            for x in sols:
                assert np.array_equal((x.astype(int) @ pre.P) % 2, pre.y_P ^ e_bits)


def test_infeasible_target_is_not_a_valid_tep():
    code, frame, pre = deficient_instances(1, seed=2, r_p=6)[0]
    valid = valid_tep_set(pre)
    rng = np.random.default_rng(0)
    for _ in range(200):
        e = rng.integers(0, 2, 8, dtype=np.uint8)
        feasible = len(sle_enumerate(pre.P.T, BitVector.from_array(pre.y_P ^ e))) > 0
        assert feasible == (BitVector.from_array(e) in valid)


def test_generated_teps_equal_feasible_set():
    for code, frame, pre in deficient_instances(20, seed=3):
        image = set()
        for i in range(1 << pre.r_P):
            e_pri = np.array([(i >> j) & 1 for j in range(pre.r_P)], dtype=np.uint8)
            image.add(BitVector.from_array(tep_from_primary(e_pri, pre)))
        assert image == valid_tep_set(pre)
        assert len(image) == 2 ** pre.r_P


def test_ml_decode_noiseless_and_first_minimiser():
    code = random_code(12, 6, 3)
    f = frame_from_gamma(np.ones(12), 1.0)
    out = ml_decode(f, code)
    assert not out.codeword.any() and out.whd == 0.0 and out.q_c == 64
    for c, f in random_frames(code, 8.0, 10, seed=1):
        assert np.array_equal(ml_decode(f, code).codeword, c)


def test_size_guards():
    big = random_code(48, 24, 1)
    f = frame_from_gamma(np.ones(48), 1.0)
    with pytest.raises(ValueError):
        ml_decode(f, big)
    with pytest.raises(ValueError):
        sle_enumerate(np.zeros((4, 17), dtype=np.uint8), np.zeros(4, dtype=np.uint8))
    with pytest.raises(ValueError):
        sle_enumerate(np.zeros((4, 6), dtype=np.uint8), np.zeros(3, dtype=np.uint8))
    with pytest.raises(ValueError):
        ml_decode(frame_from_gamma(np.ones(10), 1.0), random_code(12, 6, 3))
