# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; see ``_kernels_py`` for the reference semantics."""

import numpy as np

cimport cython
from libc.math cimport exp, sqrt, hypot, INFINITY

ctypedef double complex cplx

BACKEND = "cython"


cdef inline double cabs_(cplx z) noexcept nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef inline cplx conj_(cplx z) noexcept nogil:
    return z.conjugate()


cdef inline double dist(cplx a, cplx b, bint disk) noexcept nogil:
    if disk:
        # symmetric real part, antisymmetric imaginary part: d(a, b) == d(b, a) bitwise
        return hypot(a.real - b.real, a.imag - b.imag) / hypot(
            1.0 - (a.real * b.real + a.imag * b.imag), a.real * b.imag - a.imag * b.real)
    return cabs_(a - b)


cdef inline cplx denom(cplx zs, cplx ze, bint hyperbolic) noexcept nogil:
    if hyperbolic:
        return (ze - zs) / (1.0 - conj_(zs) * ze)
    return ze - zs


cdef inline cplx dd_inplace(const cplx[::1] pts, const cplx[::1] vals,
                            const long long* t, cplx* buf, int m,
                            bint hyperbolic) noexcept nogil:
    cdef int j, k
    for k in range(m):
        buf[k] = vals[t[k]]
    for j in range(1, m):
        for k in range(m - j):
            buf[k] = (buf[k + 1] - buf[k]) / denom(pts[t[k]], pts[t[k + j]], hyperbolic)
    return buf[0]


def divdiff_tuples(const cplx[::1] pts, const cplx[::1] vals,
                   const long long[:, ::1] tuples, bint hyperbolic):
    cdef Py_ssize_t n = tuples.shape[0], i
    cdef int m = <int>tuples.shape[1]
    out = np.empty(n, dtype=np.complex128)
    cdef cplx[::1] o = out
    cdef cplx[::1] buf = np.empty(max(m, 1), dtype=np.complex128)
    with nogil:
        for i in range(n):
            o[i] = dd_inplace(pts, vals, &tuples[i, 0], &buf[0], m, hyperbolic)
    return out


def max_damped(const cplx[::1] pts, const cplx[::1] vals, const double[::1] pw,
               int m, double B, bint hyperbolic, bint ordered,
               long long lo, long long hi):
    """Max of |divided difference| * exp(-B * sum p) over tuples of size m.

    Tuples are enumerated in lexicographic order (combinations, or
    m-permutations when ``ordered``) with first index in [lo, hi); the
    first maximiser wins ties.
    """
    cdef long long N = pts.shape[0]
    cdef long long[::1] idx = np.zeros(m, dtype=np.int64)
    cdef long long[::1] best_t = np.full(m, -1, dtype=np.int64)
    cdef signed char[::1] used = np.zeros(max(N, 1), dtype=np.int8)
    cdef cplx[::1] buf = np.empty(m, dtype=np.complex128)
    cdef double best = -1.0, val, s
    cdef long long count = 0
    cdef int pos, k
    cdef long long cand
    if m < 1 or m > N or lo >= hi:
        return best, np.asarray(best_t), count
    with nogil:
        if not ordered:
            for k in range(m):
                idx[k] = lo + k
            if idx[m - 1] < N:
                while True:
                    if idx[0] >= hi:
                        break
                    s = 0.0
                    for k in range(m):
                        s = s + pw[idx[k]]
                    val = cabs_(dd_inplace(pts, vals, &idx[0], &buf[0], m, hyperbolic)) * exp(-B * s)
                    count += 1
                    if val > best:
                        best = val
                        for k in range(m):
                            best_t[k] = idx[k]
                    # next combination
                    pos = m - 1
                    while pos >= 0 and idx[pos] == N - m + pos:
                        pos -= 1
                    if pos < 0:
                        break
                    idx[pos] += 1
                    for k in range(pos + 1, m):
                        idx[k] = idx[k - 1] + 1
        else:
            # depth-first odometer over m-permutations
            pos = 0
            idx[0] = lo - 1
            while pos >= 0:
                if idx[pos] >= 0 and idx[pos] < N:
                    used[idx[pos]] = 0
                cand = idx[pos] + 1
                while cand < N and used[cand]:
                    cand += 1
                if (pos == 0 and cand >= hi) or cand >= N:
                    idx[pos] = -1
                    pos -= 1
                    continue
                idx[pos] = cand
                used[cand] = 1
                if pos == m - 1:
                    s = 0.0
                    for k in range(m):
                        s = s + pw[idx[k]]
                    val = cabs_(dd_inplace(pts, vals, &idx[0], &buf[0], m, hyperbolic)) * exp(-B * s)
                    count += 1
                    if val > best:
                        best = val
                        for k in range(m):
                            best_t[k] = idx[k]
                else:
                    pos += 1
                    idx[pos] = -1
    return best, np.asarray(best_t), count


def min_pair_ratio(const cplx[::1] pts, const double[::1] scale, bint disk):
    """min over i<j of d(i, j) / (scale[i] + scale[j]) with its argmin."""
    cdef Py_ssize_t n = pts.shape[0], i, j
    cdef double best = INFINITY, r
    cdef Py_ssize_t bi = -1, bj = -1
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                r = dist(pts[i], pts[j], disk) / (scale[i] + scale[j])
                if r < best:
                    best = r
                    bi = i
                    bj = j
    return best, bi, bj


def min_pair_slack(const cplx[::1] pts, const double[::1] radii, bint disk):
    """min over i<j of d(i, j) - radii[i] - radii[j] with its argmin."""
    cdef Py_ssize_t n = pts.shape[0], i, j
    cdef double best = INFINITY, r
    cdef Py_ssize_t bi = -1, bj = -1
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                r = dist(pts[i], pts[j], disk) - radii[i] - radii[j]
                if r < best:
                    best = r
                    bi = i
                    bj = j
    return best, bi, bj


def max_disk_count(const cplx[::1] pts, const double[::1] radii, bint disk):
    """max over i of #{j : d(i, j) < radii[i]} (i counts itself)."""
    cdef Py_ssize_t n = pts.shape[0], i, j
    cdef long long best = 0, c
    cdef Py_ssize_t bi = -1
    with nogil:
        for i in range(n):
            c = 0
            for j in range(n):
                if j == i or dist(pts[i], pts[j], disk) < radii[i]:
                    c += 1
            if c > best:
                best = c
                bi = i
    return best, bi
