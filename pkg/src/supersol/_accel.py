"""Select between numba-compiled kernels and their plain numpy originals.

Set ``SUPERSOL_DISABLE_NUMBA=1`` to run every kernel as ordinary Python.
``SUPERSOL_THREADS`` caps the worker pool used for data-parallel loops.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_FALSY = {"", "0", "false", "no", "off"}

DISABLED = os.environ.get("SUPERSOL_DISABLE_NUMBA", "").strip().lower() not in _FALSY
USE_NUMBA = numba is not None and not DISABLED


def jit(fn):
    """Compile ``fn`` in nopython mode when numba is enabled.

    The returned object always exposes the uncompiled function as ``py_func``.
    """
    if USE_NUMBA:
        return numba.njit(cache=True)(fn)
    fn.py_func = fn
    return fn


def backend():
    return "numba" if USE_NUMBA else "numpy"


def worker_count():
    raw = os.environ.get("SUPERSOL_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def parallel_map(fn, items):
    """Map ``fn`` over ``items`` preserving order, using up to SUPERSOL_THREADS workers."""
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
