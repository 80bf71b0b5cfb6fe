"""Independent reference implementations used as test oracles.

Plain Python loops over Python complex numbers, no shared code with the
package beyond the data they are fed.
"""

import itertools
import math

import mpmath


def dd_explicit(z, w):
    """Euclidean divided difference by the explicit sum sum_i w_i / prod_{k!=i}(z_i - z_k)."""
    total = 0j
    for i, zi in enumerate(z):
        den = 1 + 0j
        for k, zk in enumerate(z):
            if k != i:
                den *= zi - zk
        total += w[i] / den
    return total


def dd_table(z, w):
    """Classic Newton table, first column downwards."""
    col = [complex(x) for x in w]
    n = len(z)
    for j in range(1, n):
        col = [(col[i + 1] - col[i]) / (z[i + j] - z[i]) for i in range(n - j)]
    return col[0]


def delta_paths(z, w, dps=50):
    """Hyperbolic difference as a sum over recursion paths in mpmath.

    Each path picks head or tail at every level; the leaf is one value and
    the weight is the signed product of inverse Blaschke denominators of
    the windows visited.
    """
    mpmath.mp.dps = dps
    zc = [mpmath.mpc(complex(x).real, complex(x).imag) for x in z]
    wc = [mpmath.mpc(complex(x).real, complex(x).imag) for x in w]
    m = len(zc) - 1
    total = mpmath.mpc(0)
    for path in itertools.product((0, 1), repeat=m):
        lo, hi = 0, m
        coef = mpmath.mpc(1)
        for step in path:
            a, b = zc[lo], zc[hi]
            coef /= (b - a) / (1 - mpmath.conj(a) * b)
            if step:  # tail window, + sign
                lo += 1
            else:
                hi -= 1
                coef = -coef
        total += coef * wc[lo]
    return complex(total)


def pair_min_ratio(z, scale, disk=False):
    best = math.inf
    for i in range(len(z)):
        for j in range(i + 1, len(z)):
            best = min(best, _dist(z[i], z[j], disk) / (scale[i] + scale[j]))
    return best


def pair_separated(z, radii, disk=False):
    for i in range(len(z)):
        for j in range(i + 1, len(z)):
            if _dist(z[i], z[j], disk) < radii[i] + radii[j]:
                return False, (i, j)
    return True, None


def disk_count(z, radii, disk=False):
    best = 0
    for i in range(len(z)):
        c = sum(1 for k in range(len(z)) if k == i or _dist(z[i], z[k], disk) < radii[i])
        best = max(best, c)
    return best


def _dist(a, b, disk):
    a, b = complex(a), complex(b)
    if disk:
        return abs(a - b) / abs(1 - b.conjugate() * a)
    return abs(a - b)


def brute_seminorm(z, w, p, n, B, hyperbolic=False):
    """max |dd| e^{-B sum p} over all ordered n-tuples of distinct indices."""
    best = 0.0
    for t in itertools.permutations(range(len(z)), n):
        zz = [z[i] for i in t]
        ww = [w[i] for i in t]
        if hyperbolic:
            d = delta_paths(zz, ww, dps=30)
        else:
            d = dd_table(zz, ww)
        best = max(best, abs(d) * math.exp(-B * sum(p[i] for i in t)))
    return best
