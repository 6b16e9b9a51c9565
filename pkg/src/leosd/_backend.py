"""Kernel backend selection.

The hot loops (Gaussian elimination, TEP enumeration, reprocessing) exist in
two flavours: numba-compiled loops and a pure-numpy path.  The numba path is
used when numba imports cleanly, unless ``LEOSD_BACKEND=numpy`` is set in the
environment before the package is imported.
"""
from __future__ import annotations

import os

_REQUESTED = os.environ.get("LEOSD_BACKEND", "").strip().lower()

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

if _REQUESTED not in ("", "numba", "numpy"):
    raise ImportError(f"LEOSD_BACKEND must be 'numba' or 'numpy', got {_REQUESTED!r}")

BACKEND = "numpy" if (_REQUESTED == "numpy" or not HAVE_NUMBA) else "numba"


def get_kernels(name: str | None = None):
    """Return the kernel module for ``name`` (default: the active backend)."""
    name = BACKEND if name is None else name
    if name == "numba":
        if BACKEND != "numba":
            raise RuntimeError("numba backend is not active (numba missing or LEOSD_BACKEND=numpy)")
        from . import _kernels_numba as mod
    elif name == "numpy":
        from . import _kernels_numpy as mod
    else:
        raise ValueError(f"unknown backend {name!r}")
    return mod
