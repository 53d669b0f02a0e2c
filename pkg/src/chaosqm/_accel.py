"""Kernel backend selection.

Hot loops are written twice: an ``@njit`` loop kernel and a vectorized numpy
kernel. The numba kernels are used when numba imports and the environment
variable ``CHAOSQM_DISABLE_NUMBA`` is unset (or ``0``). Both kernels use the
same floating-point operation order, so they agree bit for bit wherever the
underlying transcendental functions do.
"""

import os
from concurrent.futures import ThreadPoolExecutor

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
DISABLED = os.environ.get("CHAOSQM_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")
USE_NUMBA = HAVE_NUMBA and not DISABLED


def njit(fn):
    """Compile ``fn`` with numba (no fastmath, GIL released), or return it unchanged."""
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend():
    return "numba" if USE_NUMBA else "numpy"


def chunk_bounds(n, workers):
    """Split ``range(n)`` into at most ``workers`` contiguous, ordered chunks."""
    workers = max(1, min(int(workers), n)) if n > 0 else 1
    edges = [n * i // workers for i in range(workers + 1)]
    return [(edges[i], edges[i + 1]) for i in range(workers) if edges[i] < edges[i + 1]]


def map_chunks(fn, n, workers=1):
    """Apply ``fn(lo, hi)`` over contiguous chunks of ``range(n)``; results keep chunk order."""
    bounds = chunk_bounds(n, workers)
    if len(bounds) <= 1:
        return [fn(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
        return list(pool.map(lambda b: fn(*b), bounds))


def select(numba_impl, numpy_impl):
    return numba_impl if USE_NUMBA else numpy_impl
