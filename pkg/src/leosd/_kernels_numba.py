"""numba-compiled kernels (re-exported from the loop module)."""
from __future__ import annotations

from ._loops import ext_table, ge_reduce, ile_reprocess, reprocess, whd_table

NAME = "numba"

__all__ = ["NAME", "ext_table", "ge_reduce", "ile_reprocess", "reprocess", "whd_table"]
