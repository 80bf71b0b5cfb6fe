"""Pure numpy kernels, the fallback for ``_ckernels``.

Both modules expose the same functions with the same argument order and
tie-breaking: lexicographic enumeration, first maximiser or minimiser wins.
"""

from __future__ import annotations

import itertools

import numpy as np

BACKEND = "numpy"

_CHUNK = 65536


def _dist_matrix(a, b, disk):
    ar, ai = a.real[:, None], a.imag[:, None]
    br, bi = b.real[None, :], b.imag[None, :]
    d = np.hypot(ar - br, ai - bi)
    if disk:
        # symmetric real part, antisymmetric imaginary part
        d = d / np.hypot(1.0 - (ar * br + ai * bi), ar * bi - ai * br)
    return d


def divdiff_tuples(pts, vals, tuples, hyperbolic):
    pts = np.asarray(pts, dtype=complex)
    tuples = np.asarray(tuples, dtype=np.int64)
    if tuples.ndim != 2:
        raise ValueError("tuples must be a 2-d index array")
    m = tuples.shape[1]
    buf = np.asarray(vals, dtype=complex)[tuples].copy()
    z = pts[tuples]
    for j in range(1, m):
        zs = z[:, : m - j]
        ze = z[:, j:]
        den = ze - zs
        if hyperbolic:
            den = den / (1.0 - np.conj(zs) * ze)
        buf[:, : m - j] = (buf[:, 1 : m - j + 1] - buf[:, : m - j]) / den
    return buf[:, 0].copy() if m else np.empty(0, dtype=complex)


def _tuple_stream(n, m, ordered, lo, hi):
    gen = itertools.permutations if ordered else itertools.combinations
    for first in range(lo, hi):
        rest = [i for i in range(n) if i != first] if ordered else range(first + 1, n)
        for tail in gen(rest, m - 1):
            yield (first,) + tail


def max_damped(pts, vals, pw, m, B, hyperbolic, ordered, lo, hi):
    n = len(pts)
    best = -1.0
    best_t = np.full(m, -1, dtype=np.int64)
    count = 0
    if m < 1 or m > n or lo >= hi:
        return best, best_t, count
    pw = np.asarray(pw, dtype=float)
    stream = _tuple_stream(n, m, ordered, lo, min(hi, n))
    while True:
        flat = np.fromiter(itertools.chain.from_iterable(itertools.islice(stream, _CHUNK)),
                           dtype=np.int64)
        if flat.size == 0:
            break
        tup = flat.reshape(-1, m)
        dd = divdiff_tuples(pts, vals, tup, hyperbolic)
        val = np.abs(dd) * np.exp(-B * pw[tup].sum(axis=1))
        count += len(tup)
        k = int(np.argmax(val))
        if val[k] > best:
            best = float(val[k])
            best_t = tup[k].copy()
    return best, best_t, count


def min_pair_ratio(pts, scale, disk):
    pts = np.asarray(pts, dtype=complex)
    scale = np.asarray(scale, dtype=float)
    best, bi, bj = np.inf, -1, -1
    for i in range(len(pts) - 1):
        r = _dist_matrix(pts[i : i + 1], pts[i + 1 :], disk)[0] / (scale[i] + scale[i + 1 :])
        k = int(np.argmin(r))
        if r[k] < best:
            best, bi, bj = float(r[k]), i, i + 1 + k
    return best, bi, bj


def min_pair_slack(pts, radii, disk):
    pts = np.asarray(pts, dtype=complex)
    radii = np.asarray(radii, dtype=float)
    best, bi, bj = np.inf, -1, -1
    for i in range(len(pts) - 1):
        r = _dist_matrix(pts[i : i + 1], pts[i + 1 :], disk)[0] - radii[i] - radii[i + 1 :]
        k = int(np.argmin(r))
        if r[k] < best:
            best, bi, bj = float(r[k]), i, i + 1 + k
    return best, bi, bj


def max_disk_count(pts, radii, disk):
    pts = np.asarray(pts, dtype=complex)
    radii = np.asarray(radii, dtype=float)
    best, bi = 0, -1
    for i in range(len(pts)):
        d = _dist_matrix(pts[i : i + 1], pts, disk)[0]
        inside = d < radii[i]
        inside[i] = True
        c = int(inside.sum())
        if c > best:
            best, bi = c, i
    return best, bi
