"""Linear-equation ordered-statistics decoding (LE-OSD) for binary linear block codes."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .channel import ReceivedFrame, frame_from_gamma, n0_from_snr_db, transmit
from .codes import LinearCode, builtin_code, encode, random_code
from .ileosd import ConditionThresholds, decode_improved
from .leosd import LeosdParams, decode, preprocess
from .osd_baseline import DecodeOutcome, OpCounters, decode_osd

__all__ = [
    "BACKEND",
    "ConditionThresholds",
    "DecodeOutcome",
    "LeosdParams",
    "LinearCode",
    "OpCounters",
    "ReceivedFrame",
    "builtin_code",
    "decode",
    "decode_improved",
    "decode_osd",
    "encode",
    "frame_from_gamma",
    "n0_from_snr_db",
    "preprocess",
    "random_code",
    "transmit",
]
