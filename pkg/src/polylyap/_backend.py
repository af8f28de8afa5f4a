"""Kernel backend selection.

Set ``POLYLYAP_BACKEND=numpy`` to bypass numba and run the vectorised numpy
kernels instead. Any other value (or unset) uses numba when it imports.
"""
import os

_requested = os.environ.get("POLYLYAP_BACKEND", "numba").strip().lower()

try:
    if _requested == "numpy":
        raise ImportError
    from numba import njit  # noqa: F401

    USE_NUMBA = True
except ImportError:
    USE_NUMBA = False

BACKEND = "numba" if USE_NUMBA else "numpy"
