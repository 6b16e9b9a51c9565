"""BPSK over AWGN: transmission, hard decisions and reliabilities."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import log_expit

from .gf2_core import as_bits

__all__ = [
    "ReceivedFrame",
    "bit_error_prob",
    "frame_from_gamma",
    "log_bit_error_prob",
    "n0_from_snr_db",
    "snr_db_from_n0",
    "sort_ascending",
    "sort_descending",
    "transmit",
]


def n0_from_snr_db(snr_db: float) -> float:
    """Noise density for SNR = 2 / N0 expressed in dB."""
    return 2.0 / 10.0 ** (snr_db / 10.0)


def snr_db_from_n0(n0: float) -> float:
    return 10.0 * np.log10(2.0 / n0)


@dataclass(frozen=True)
class ReceivedFrame:
    gamma: np.ndarray
    y: np.ndarray
    alpha: np.ndarray
    n0: float

    @property
    def n(self) -> int:
        return self.gamma.shape[0]


def frame_from_gamma(gamma, n0: float) -> ReceivedFrame:
    gamma = np.asarray(gamma, dtype=np.float64)
    if n0 <= 0:
        raise ValueError("n0 must be positive")
    y = (gamma < 0).astype(np.uint8)
    return ReceivedFrame(gamma, y, np.abs(gamma), float(n0))


def transmit(c, n0: float, rng) -> ReceivedFrame:
    """BPSK symbols (-1)^c plus Gaussian noise of variance n0 / 2."""
    if n0 <= 0:
        raise ValueError("n0 must be positive")
    c = as_bits(c, 1)
    rng = np.random.default_rng(rng)
    s = 1.0 - 2.0 * c.astype(np.float64)
    gamma = s + np.sqrt(n0 / 2.0) * rng.standard_normal(c.shape[0])
    return frame_from_gamma(gamma, n0)


def bit_error_prob(alpha, n0: float):
    """Pe = 1 / (1 + exp(4 alpha / N0)), evaluated without overflow.

    Goes through log_expit so tiny values keep their subnormal tail.
    """
    return np.exp(log_expit(-4.0 * np.asarray(alpha, dtype=np.float64) / n0))


def log_bit_error_prob(alpha, n0: float):
    """(log Pe, log(1 - Pe)), both finite for every finite alpha."""
    x = 4.0 * np.asarray(alpha, dtype=np.float64) / n0
    return log_expit(-x), log_expit(x)


def sort_ascending(frame: ReceivedFrame):
    """Stable ascending sort of reliabilities; ties keep original index order.

    Returns (perm, y[perm], alpha[perm]).
    """
    perm = np.argsort(frame.alpha, kind="stable")
    return perm, frame.y[perm], frame.alpha[perm]


def sort_descending(frame: ReceivedFrame):
    perm = np.argsort(-frame.alpha, kind="stable")
    return perm, frame.y[perm], frame.alpha[perm]
