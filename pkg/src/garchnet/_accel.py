"""Optional numba acceleration.

Hot kernels are written once as plain Python over numpy arrays and compiled
with :func:`numba.njit` when numba is importable.  Set the environment
variable ``GARCHNET_DISABLE_NUMBA=1`` to force the pure-Python path (useful
for debugging and for benchmarking the two paths against each other).
"""

from __future__ import annotations

import os

_DISABLED = os.environ.get("GARCHNET_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba as _numba
except ImportError:  # pragma: no cover - depends on environment
    _numba = None

HAVE_NUMBA = _numba is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged."""
    if _numba is None:
        return func
    return _numba.njit(cache=False)(func)


def select(py_impl, nb_impl):
    return nb_impl if USE_NUMBA else py_impl
