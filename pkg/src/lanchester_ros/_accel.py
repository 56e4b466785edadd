"""Optional numba acceleration.

Kernels are written as plain loops over numpy arrays so the same source runs
under ``numba.njit`` or as ordinary Python. Set ``LANCHESTER_ROS_NO_NUMBA=1``
to force the pure-Python/numpy path (useful for debugging and for the
benchmark's baseline).
"""
import os

_DISABLE = os.environ.get("LANCHESTER_ROS_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLE:
        raise ImportError
    import numba
    HAS_NUMBA = True
except ImportError:
    numba = None
    HAS_NUMBA = False


def jit(fn):
    """Compile ``fn`` with numba in nopython mode, or return it unchanged."""
    if not HAS_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)


def backend():
    return "numba" if HAS_NUMBA else "python"
