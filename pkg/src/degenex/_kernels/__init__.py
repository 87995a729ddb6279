"""Kernel backend selection.

The compiled Cython extension is preferred when it imported cleanly;
otherwise (or when DEGENEX_FORCE_PURE=1 is set) the numpy fallback in
`pyback` is used. Both backends export the same functions with identical
semantics; `benchmarks/bench_kernels.py` compares their speed.
"""

import os

from . import pyback

if os.environ.get("DEGENEX_FORCE_PURE") == "1":
    _impl = pyback
    BACKEND = "pure"
else:
    try:
        from . import _fastcore as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = pyback
        BACKEND = "pure"

jacobi_eigh = _impl.jacobi_eigh
batch_jacobi_eigh = _impl.batch_jacobi_eigh
batch_jacobi_eigvals = _impl.batch_jacobi_eigvals
batch_sigma_max = _impl.batch_sigma_max
sum_log_abs_diff = _impl.sum_log_abs_diff
pairwise_log_abs = _impl.pairwise_log_abs
leja_accumulate = _impl.leja_accumulate

__all__ = [
    "BACKEND",
    "jacobi_eigh",
    "batch_jacobi_eigh",
    "batch_jacobi_eigvals",
    "batch_sigma_max",
    "sum_log_abs_diff",
    "pairwise_log_abs",
    "leja_accumulate",
]
