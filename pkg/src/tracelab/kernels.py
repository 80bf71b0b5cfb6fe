"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy implementation in ``_kernels_py``. Setting ``TRACELAB_PURE_PYTHON=1``
forces the fallback. ``TRACELAB_THREADS`` caps the worker count used for
exhaustive tuple scans.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels_py

if os.environ.get("TRACELAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND


def get_backend(name: str | None = None):
    """Kernel module by name (``"cython"`` or ``"numpy"``); default is the active one."""
    if name is None:
        return _impl
    if name == "numpy":
        return _kernels_py
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def max_workers() -> int:
    env = os.environ.get("TRACELAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def _c(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def _f(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def divdiff_tuples(pts, vals, tuples, hyperbolic=False, backend=None):
    tuples = np.ascontiguousarray(tuples, dtype=np.int64)
    if tuples.ndim != 2:
        raise ValueError("tuples must be a 2-d index array")
    if tuples.shape[0] == 0:
        return np.empty(0, dtype=complex)
    return get_backend(backend).divdiff_tuples(_c(pts), _c(vals), tuples, bool(hyperbolic))


def max_damped(pts, vals, pw, m, B, hyperbolic=False, ordered=False, backend=None,
               workers=None):
    """Deterministic parallel max of ``|dd| exp(-B sum p)`` over all m-tuples.

    Returns ``(best, tuple, count)``. The scan is split by leading index;
    partial results are reduced in index order with strict ``>``, so ties go
    to the lexicographically first tuple whatever the thread count.
    """
    impl = get_backend(backend)
    pts, vals, pw = _c(pts), _c(vals), _f(pw)
    n = len(pts)
    workers = max_workers() if workers is None else workers
    if workers <= 1 or n < 16:
        return impl.max_damped(pts, vals, pw, int(m), float(B), bool(hyperbolic),
                               bool(ordered), 0, n)
    bounds = np.linspace(0, n, min(n, 4 * workers) + 1).astype(int)
    spans = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(lambda s: impl.max_damped(pts, vals, pw, int(m), float(B),
                                                      bool(hyperbolic), bool(ordered), *s),
                            spans))
    best, best_t, count = -1.0, np.full(int(m), -1, dtype=np.int64), 0
    for b, t, c in parts:
        count += c
        if b > best:
            best, best_t = b, t
    return best, np.asarray(best_t), count


def min_pair_ratio(pts, scale, disk=False, backend=None):
    return get_backend(backend).min_pair_ratio(_c(pts), _f(scale), bool(disk))


def min_pair_slack(pts, radii, disk=False, backend=None):
    return get_backend(backend).min_pair_slack(_c(pts), _f(radii), bool(disk))


def max_disk_count(pts, radii, disk=False, backend=None):
    return get_backend(backend).max_disk_count(_c(pts), _f(radii), bool(disk))
