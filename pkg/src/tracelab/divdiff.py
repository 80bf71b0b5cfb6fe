"""Divided differences on discrete sets and the seminorms built from them.

Euclidean differences use the denominator ``z_last - z_first``; on the
disk the denominator is the Blaschke factor ``b_{z_first}(z_last)`` and the
recursion is applied to the hyperbolic differences of lower order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .core import ATOL, GrowthBound, Metric, PointSet, Weight, eval_weight
from .errors import BudgetError, PreconditionError, VerificationError
from .expr import FunctionExpr

EXACT_BUDGET = 10**7


@dataclass(frozen=True, eq=False)
class ValuedSet:
    """A point set with one complex value per point."""

    pointset: PointSet
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex).reshape(-1)
        if len(vals) != len(self.pointset):
            raise ValueError(f"{len(vals)} values for {len(self.pointset)} points")
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite value")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def points(self) -> np.ndarray:
        return self.pointset.points

    @property
    def metric(self) -> Metric:
        return self.pointset.metric

    def __len__(self):
        return len(self.pointset)

    def __eq__(self, other):
        if not isinstance(other, ValuedSet):
            return NotImplemented
        return self.pointset == other.pointset and np.array_equal(self.values, other.values)

    def subset(self, indices) -> "ValuedSet":
        idx = np.asarray(indices, dtype=int)
        return ValuedSet(self.pointset.subset(idx), self.values[idx])


def _check_tuple(n_points: int, req: Sequence[int]) -> np.ndarray:
    t = np.asarray(req, dtype=np.int64).reshape(-1)
    if len(t) == 0:
        raise PreconditionError("empty tuple")
    if np.any(t < 0) or np.any(t >= n_points):
        raise PreconditionError(f"tuple index out of range: {t.tolist()}")
    if len(np.unique(t)) != len(t):
        raise PreconditionError(f"duplicate indices in tuple {t.tolist()}")
    return t


def _hyperbolic(metric) -> bool:
    return Metric.parse(metric) is Metric.DISK


def divided_difference(v: ValuedSet, req: Sequence[int], metric: Metric | str | None = None) -> complex:
    """Divided difference of order ``len(req) - 1`` over the indexed points.

    ``metric`` defaults to the set's own metric; ``"disk"`` selects the
    hyperbolic denominators.
    """
    t = _check_tuple(len(v), req)
    hyp = _hyperbolic(v.metric if metric is None else metric)
    return complex(kernels.divdiff_tuples(v.points, v.values, t[None, :], hyp)[0])


def divided_differences(v: ValuedSet, tuples, metric=None) -> np.ndarray:
    """Vectorised :func:`divided_difference` over a 2-d array of index tuples."""
    tuples = np.asarray(tuples, dtype=np.int64)
    hyp = _hyperbolic(v.metric if metric is None else metric)
    return kernels.divdiff_tuples(v.points, v.values, tuples, hyp)


def divided_difference_points(z: Sequence[complex], values: Sequence[complex], hyperbolic: bool = False) -> complex:
    """Divided difference of explicit values at explicit distinct nodes."""
    z = np.asarray(z, dtype=complex)
    t = np.arange(len(z), dtype=np.int64)[None, :]
    return complex(kernels.divdiff_tuples(z, values, t, hyperbolic)[0])


def newton_coefficients(z: Sequence[complex], values: Sequence[complex]) -> np.ndarray:
    """Leading-edge divided differences ``[w(z1), Δ(z1,z2), Δ(z1,z2,z3), ...]``."""
    z = np.asarray(z, dtype=complex)
    k = len(z)
    out = np.empty(k, dtype=complex)
    for i in range(k):
        out[i] = kernels.divdiff_tuples(z, values, np.arange(i + 1, dtype=np.int64)[None, :], False)[0]
    return out


def blaschke_newton_coefficients(z: Sequence[complex], values: Sequence[complex]) -> np.ndarray:
    """Coefficients of the interpolant in the basis ``1, b1, b1 b2, ...``.

    ``b_i`` is the Blaschke factor at ``z[i-1]``. Computed by forward
    substitution on the lower-triangular system; for one or two nodes they
    coincide with the hyperbolic divided differences.
    """
    z = np.asarray(z, dtype=complex)
    vals = np.asarray(values, dtype=complex)
    k = len(z)
    c = np.zeros(k, dtype=complex)
    for m in range(k):
        basis = 1.0 + 0j
        acc = 0j
        for i in range(m):
            acc += c[i] * basis
            basis *= (z[m] - z[i]) / (1.0 - np.conj(z[i]) * z[m])
        c[m] = (vals[m] - acc) / basis
    return c


def contour_oracle(f: FunctionExpr, tuple_points: Sequence[complex], radius: float | None = None,
                   quad_points: int = 512, center: complex = 0.0) -> complex:
    """Divided difference of ``f`` at the nodes as a contour integral.

    Trapezoidal rule for ``(1/2πi) ∮ f(ζ) / Π(ζ - z_i) dζ`` on the circle
    ``|ζ - center| = radius``. The default radius is ``2 + max|z_i|`` for
    entire ``f``; when ``f`` has poles it is the midpoint between the
    outermost node and the nearest pole.
    """
    z = np.asarray(tuple_points, dtype=complex).reshape(-1)
    if len(z) == 0:
        raise PreconditionError("empty tuple")
    if quad_points < 64:
        raise PreconditionError("quad_points must be at least 64")
    rel = np.abs(z - center)
    poles = np.asarray(f.poles(), dtype=complex)
    pole_r = np.min(np.abs(poles - center)) if len(poles) else np.inf
    if radius is None:
        if np.isfinite(pole_r):
            if pole_r <= rel.max():
                raise PreconditionError("a pole of f lies inside the node hull radius")
            radius = 0.5 * (rel.max() + pole_r)
        else:
            radius = 2.0 + rel.max()
    on = np.flatnonzero(np.abs(rel - radius) <= 1e-12 * max(radius, 1.0))
    if len(on):
        raise PreconditionError(f"contour passes through node {int(on[0])}")
    if np.any(rel > radius):
        raise PreconditionError("contour does not enclose all nodes")
    if pole_r <= radius:
        raise PreconditionError("f has a pole inside the contour")
    theta = 2.0 * np.pi * np.arange(quad_points) / quad_points
    dz = radius * np.exp(1j * theta)
    zeta = center + dz
    g = f(zeta) / np.prod(zeta[:, None] - z[None, :], axis=1)
    return complex(np.mean(g * dz))


def rel_err(a: complex, b: complex, floor: float = 1.0) -> float:
    """``|a - b| / max(|a|, |b|, floor)``."""
    return abs(a - b) / max(abs(a), abs(b), floor)


# -- seminorms ---------------------------------------------------------------


@dataclass(frozen=True)
class SeminormCurve:
    n: int
    samples: tuple

    def to_json(self) -> dict:
        return {"order": self.n, "curve": [[float(b), float(s)] for b, s in self.samples]}


@dataclass(frozen=True)
class SeminormResult:
    value: float
    tuple: tuple
    evaluated: int


def _weights_at(v: ValuedSet, w: Weight) -> np.ndarray:
    return np.asarray(eval_weight(w, v.points), dtype=float).reshape(-1)


def seminorm(v: ValuedSet, w: Weight, n: int, B: float, mode="exact", seed: int = 0,
             return_witness: bool = False, metric=None):
    """Largest damped divided difference of order ``n - 1``.

    ``S_B = max |Δ^{n-1} ω(λ_1..λ_n)| exp(-B Σ p(λ_i))`` over tuples of
    distinct points. ``mode`` is ``"exact"`` or ``("sampled", k)``; the
    sampled value is a lower bound from ``k`` random ordered tuples.

    Euclidean differences are symmetric, so exact mode enumerates each
    support once. Hyperbolic differences are not, and exact mode then runs
    over ordered tuples.
    """
    if n < 1:
        raise PreconditionError("order n must be >= 1")
    N = len(v)
    if n > N:
        raise PreconditionError(f"n={n} exceeds the number of points {N}")
    hyp = _hyperbolic(v.metric if metric is None else metric)
    pw = _weights_at(v, w)
    if mode == "exact":
        if float(N) ** n > EXACT_BUDGET:
            raise BudgetError(f"|Λ|^n = {N}^{n} exceeds {EXACT_BUDGET:.0e}; use sampled mode")
        best, t, count = kernels.max_damped(v.points, v.values, pw, n, B, hyperbolic=hyp,
                                            ordered=hyp)
    else:
        kind, k = mode
        if kind != "sampled":
            raise ValueError(f"unknown mode {mode!r}")
        rng = np.random.default_rng(seed)
        best, t, count = -1.0, np.full(n, -1), 0
        remaining = int(k)
        while remaining > 0:
            m = min(remaining, 4096)
            tup = np.argsort(rng.random((m, N)), axis=1)[:, :n].astype(np.int64)
            tup = np.ascontiguousarray(tup)
            dd = kernels.divdiff_tuples(v.points, v.values, tup, hyp)
            val = np.abs(dd) * np.exp(-B * pw[tup].sum(axis=1))
            i = int(np.argmax(val))
            if val[i] > best:
                best, t = float(val[i]), tup[i]
            remaining -= m
            count += m
    best = max(float(best), 0.0)
    if return_witness:
        return SeminormResult(best, tuple(int(i) for i in t), int(count))
    return best


def seminorm_curve(v: ValuedSet, w: Weight, n: int, Bs: Sequence[float], mode="exact",
                   seed: int = 0) -> SeminormCurve:
    samples = tuple((float(B), seminorm(v, w, n, B, mode=mode, seed=seed)) for B in Bs)
    return SeminormCurve(n, samples)


def min_B_below(curve: SeminormCurve, A: float) -> float | None:
    """Smallest sampled ``B`` with ``S_B <= A`` (None if no sample qualifies)."""
    ok = [b for b, s in curve.samples if s <= A]
    return min(ok) if ok else None


# -- telescoping chain --------------------------------------------------------


def default_anchors(n_points: int, tup: Sequence[int], count: int) -> list[int]:
    """The first ``count`` indices not used by ``tup``."""
    used = set(int(i) for i in tup)
    out = [i for i in range(n_points) if i not in used][:count]
    if len(out) < count:
        raise PreconditionError(f"need {count} anchors outside the tuple, only {len(out)} available")
    return out


@dataclass(frozen=True)
class ChainTerm:
    """``difference * factor`` with ``difference = Δ^n`` on ``support``."""

    support: tuple
    difference: complex
    factor: complex

    @property
    def value(self) -> complex:
        return self.difference * self.factor


def chain_terms(v: ValuedSet, tup: Sequence[int], anchors: Sequence[int] | None = None):
    """Terms of the telescoping expansion of ``Δ^{n-1} ω(λ_1..λ_n)``.

    With anchors ``μ_1..μ_n`` and ``T_0 = (λ_1..λ_n)``,
    ``T_i = (μ_i, T_{i-1} minus its last point)``, the identity is

        Δ^{n-1}(T_0) = Σ_i Δ^n(μ_i, T_{i-1}) (last(T_{i-1}) - μ_i) + Δ^{n-1}(T_n).

    Returns the ``n`` chain terms and the tail value ``Δ^{n-1}(T_n)``.
    Always Euclidean.
    """
    t = [int(i) for i in _check_tuple(len(v), tup)]
    n = len(t)
    if anchors is None:
        anchors = default_anchors(len(v), t, n)
    anchors = [int(a) for a in anchors]
    if len(anchors) != n:
        raise PreconditionError(f"need exactly {n} anchors, got {len(anchors)}")
    if set(anchors) & set(t):
        raise PreconditionError("anchors intersect the tuple")
    _check_tuple(len(v), anchors)
    z = v.points
    terms = []
    prev = list(t)
    for mu in anchors:
        support = [mu] + prev
        d = divided_difference(v, support, Metric.PLANE)
        terms.append(ChainTerm(tuple(support), d, z[prev[-1]] - z[mu]))
        prev = [mu] + prev[:-1]
    tail = divided_difference(v, prev, Metric.PLANE)
    return terms, tail


def chain_bound_expand(v: ValuedSet, tup: Sequence[int], anchors: Sequence[int] | None = None) -> complex:
    """Right-hand side of the telescoping identity; equals ``Δ^{n-1}`` on ``tup``."""
    terms, tail = chain_terms(v, tup, anchors)
    return complex(sum(tm.value for tm in terms) + tail)


def chain_bound(v: ValuedSet, w: Weight, tup, anchors, B: float, S: float) -> float:
    """Bound on ``|Δ^{n-1}(tup)|`` from an order-n seminorm value ``S`` at ``B``."""
    terms, tail = chain_terms(v, tup, anchors)
    pw = _weights_at(v, w)
    total = abs(tail)
    for tm in terms:
        total += S * math.exp(B * pw[list(tm.support)].sum()) * abs(tm.factor)
    return total


@dataclass(frozen=True)
class ChainControl:
    """Measured ``|Δ^{n-1}| <= K exp(B' Σp)`` derived from the order-n seminorm."""

    K: float
    B: float
    anchors: tuple
    S: float
    worst_ratio: float  # max |Δ^{n-1}| / chain bound; <= 1 when the chain bound holds


def chain_control(v: ValuedSet, w: Weight, n: int, B: float, anchors=None) -> ChainControl:
    """Turn a finite order-``n`` seminorm (tuples of ``n+1`` points) into order-``(n-1)`` control.

    ``anchors`` are fixed for all tuples (the first ``n`` indices by
    default); tuples meeting the anchors are skipped, the finitely many
    exceptions being absorbed in the constant. ``B' = B + 1/(2K)`` absorbs
    the factors ``|λ - μ|`` through the logarithmic lower bound.
    """
    from itertools import combinations

    S = seminorm(v, w, n + 1, B, metric=Metric.PLANE)
    if anchors is None:
        anchors = list(range(n))
    anchors = [int(a) for a in anchors]
    pw = _weights_at(v, w)
    Bp = B + (0.5 / w.K if w.metric is Metric.PLANE else 0.0)
    K = 0.0
    worst = 0.0
    others = [i for i in range(len(v)) if i not in set(anchors)]
    for tup in combinations(others, n):
        bound = chain_bound(v, w, tup, anchors, B, S)
        actual = abs(divided_difference(v, tup, Metric.PLANE))
        if bound > 0:
            worst = max(worst, actual / bound)
        elif actual > ATOL:
            worst = math.inf
        K = max(K, bound * math.exp(-Bp * pw[list(tup)].sum()))
    return ChainControl(K, Bp, tuple(anchors), S, worst)


# -- growth certificates ------------------------------------------------------


def growth_certificate(f: FunctionExpr, w: Weight, j: int, tuples, B_f: float,
                       cross_check: bool = False, tol: float = 1e-8) -> GrowthBound:
    """Measured bound ``|Δ^j f(z_1..z_{j+1})| <= A' exp(B' Σ p(z_i))``.

    ``tuples`` is an array of shape ``(count, j+1)`` of complex nodes.
    ``B' = B_f + j D0`` is the exponent the inductive argument produces;
    ``A'`` is the largest observed ratio. With ``cross_check`` every
    difference is compared against :func:`contour_oracle`.
    """
    tuples = np.asarray(tuples, dtype=complex)
    if tuples.ndim != 2 or tuples.shape[1] != j + 1:
        raise PreconditionError(f"tuples must have shape (count, {j + 1})")
    hyp = w.metric is Metric.DISK
    Bp = B_f + j * w.D0
    A = 0.0
    for row in tuples:
        d = divided_difference_points(row, f(row), hyperbolic=hyp)
        if cross_check and not hyp:
            ref = contour_oracle(f, row)
            if rel_err(d, ref) > tol:
                raise VerificationError(f"recursion {d} and contour {ref} disagree", witness=row.tolist())
        s = float(np.sum(eval_weight(w, row)))
        A = max(A, abs(d) * math.exp(-Bp * s))
    return GrowthBound(A, Bp)


def random_tuples(rng: np.random.Generator, count: int, size: int, radius: float,
                  min_gap: float = 0.0) -> np.ndarray:
    """``count`` rows of ``size`` random distinct points uniform in ``|z| <= radius``."""
    out = np.empty((count, size), dtype=complex)
    for i in range(count):
        while True:
            r = radius * np.sqrt(rng.random(size))
            z = r * np.exp(2j * np.pi * rng.random(size))
            if size < 2:
                break
            d = np.abs(z[:, None] - z[None, :])
            if d[~np.eye(size, dtype=bool)].min() > max(min_gap, 0.0):
                break
        out[i] = z
    return out
