"""Backend selection for the compiled kernels.

The hot loops in :mod:`distwave._integrate` are written once in plain
numpy-compatible Python and compiled with numba unless the environment
variable ``DISTWAVE_PURE_NUMPY`` is set to a truthy value (or numba is not
importable), in which case the same functions run uncompiled.  Results agree
between the two paths to rounding error; see ``benchmarks/bench_backends.py``
for the speed comparison.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("DISTWAVE_PURE_NUMPY", "").strip().lower()
_FORCE_PY = _FLAG in {"1", "true", "yes", "on"}

JIT_ENABLED = False
if not _FORCE_PY:
    try:
        import numba  # noqa: F401

        JIT_ENABLED = True
    except ImportError:
        JIT_ENABLED = False


def njit_or_py(**options):
    """Return ``numba.njit(**options)`` or a no-op decorator."""
    if JIT_ENABLED:
        from numba import njit

        return njit(**options)

    def passthrough(fn):
        return fn

    return passthrough


def backend_name() -> str:
    return "numba" if JIT_ENABLED else "numpy"


def set_threads(n: int) -> None:
    """Pin the numba thread pool; 0 keeps the library default. No-op without JIT."""
    if JIT_ENABLED and n > 0:
        import numba

        numba.set_num_threads(n)
