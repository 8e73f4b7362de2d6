"""Optional numba acceleration for the hot kernels.

Set ``ACTIVEFLUX_NUMBA=0`` to force the pure-python/numpy fallback path.
Every kernel is written in nopython-compatible style so the undecorated
function is the fallback; ``maybe_njit`` either jits it or returns it as is.
"""

import os

_env = os.environ.get("ACTIVEFLUX_NUMBA", "1").strip().lower()
_want_numba = _env not in ("0", "false", "no", "off")

if _want_numba:
    try:
        import numba
    except ImportError:
        numba = None
else:
    numba = None

NUMBA_ENABLED = numba is not None


def maybe_njit(func):
    """Jit `func` when numba is enabled, otherwise return it unchanged."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(func)
    return func
