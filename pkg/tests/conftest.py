import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from leosd.channel import n0_from_snr_db, transmit
from leosd.codes import builtin_code, encode, random_code
from leosd.leosd import preprocess

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def ebch64_30():
    return builtin_code("ebch64_30")


@pytest.fixture(scope="session")
def ebch8_4():
    return builtin_code("ebch8_4")


@pytest.fixture(scope="session")
def code16_8():
    return random_code(16, 8, 2024)


def random_frames(code, snr_db, count, seed=0):
    """(codeword, frame) pairs with random messages."""
    rng = np.random.default_rng(seed)
    n0 = n0_from_snr_db(snr_db)
    out = []
    for _ in range(count):
        c = encode(code, rng.integers(0, 2, code.k, dtype=np.uint8))
        out.append((c, transmit(c, n0, rng)))
    return out


def deficient_instances(count, seed=0, n=16, k=8, r_p=None, snr_db=0.0):
    """(code, frame, pre) triples whose ordered parity block is rank deficient.

    With ``r_p`` given only instances of exactly that rank are kept.
    """
    rng = np.random.default_rng(seed)
    n0 = n0_from_snr_db(snr_db)
    out = []
    while len(out) < count:
        code = random_code(n, k, int(rng.integers(1 << 30)))
        c = encode(code, rng.integers(0, 2, k, dtype=np.uint8))
        frame = transmit(c, n0, rng)
        pre = preprocess(frame, code)
        full = min(k, n - k)
        if (r_p is None and pre.r_P < full) or pre.r_P == r_p:
            out.append((code, frame, pre))
    return out


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def verdict(capsys):
    """verdict(number, ok, detail) prints and records one PASS/FAIL line."""
    def record(number, ok, detail):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[number] = line
        with capsys.disabled():
            print("\n" + line, flush=True)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
