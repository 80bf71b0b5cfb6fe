"""Weak separation, the counting condition and greedy decomposition.

A set is weakly separated with parameters ``(eps, C)`` when the disks
``D(λ, eps exp(-C p(λ)))`` are pairwise disjoint. Disks are open, so two of
them are disjoint exactly when the distance of the centers is at least the
sum of the radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import Metric, PointSet, Weight, eval_weight, pairwise_distances
from .divdiff import ValuedSet, divided_difference
from .errors import PreconditionError, VerificationError


@dataclass(frozen=True)
class SeparationParams:
    eps: float
    C: float

    def __post_init__(self):
        if not self.eps > 0:
            raise PreconditionError(f"eps must be positive, got {self.eps}")
        if not self.C >= 0:
            raise PreconditionError(f"C must be nonnegative, got {self.C}")

    def radii(self, s: PointSet, w: Weight) -> np.ndarray:
        return self.eps * np.exp(-self.C * _p(s, w))

    def derived(self, w: Weight) -> "SeparationParams":
        """Parameters ``(exp(-E0 C) eps / 2, D0 C)`` of the extracted subsequences."""
        return SeparationParams(math.exp(-w.E0 * self.C) * self.eps / 2.0, w.D0 * self.C)


def _p(s: PointSet, w: Weight) -> np.ndarray:
    return np.asarray(eval_weight(w, s.points), dtype=float).reshape(-1)


def _disk(s: PointSet) -> bool:
    return s.metric is Metric.DISK


@dataclass
class SeparationReport:
    ok: bool
    witness: tuple | None = None  # closest pair by slack
    slack: float = math.inf

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"separated": self.ok, "witness": list(self.witness) if self.witness else None,
                "slack": self.slack if math.isfinite(self.slack) else None}


def is_weakly_separated(s: PointSet, w: Weight, params: SeparationParams) -> SeparationReport:
    """Pairwise disjointness of the disks ``D(λ, eps e^{-C p(λ)})``.

    The witness is the pair with the smallest slack
    ``d(λ, λ') - r(λ) - r(λ')``; it is a violation when ``ok`` is False.
    """
    if len(s) < 2:
        return SeparationReport(True)
    slack, i, j = kernels.min_pair_slack(s.points, params.radii(s, w), _disk(s))
    return SeparationReport(slack >= 0, (int(i), int(j)), float(slack))


def max_eps(s: PointSet, w: Weight, C: float) -> float:
    """Largest ``eps`` for which ``s`` is weakly separated at exponent ``C``.

    Returns ``inf`` for fewer than two points.
    """
    if len(s) < 2:
        return math.inf
    ratio, _, _ = kernels.min_pair_ratio(s.points, np.exp(-C * _p(s, w)), _disk(s))
    return float(ratio)


def count_condition(s: PointSet, w: Weight, params: SeparationParams, return_center: bool = False):
    """Largest number of points in one disk ``D(λ, eps e^{-C p(λ)})``, λ included."""
    if len(s) == 0:
        return (0, None) if return_center else 0
    count, center = kernels.max_disk_count(s.points, params.radii(s, w), _disk(s))
    if return_center:
        return int(count), int(center)
    return int(count)


@dataclass
class Decomposition:
    """``parts[k]`` are indices into the input set; all parts share ``params``."""

    parts: list
    params: SeparationParams
    source_params: SeparationParams

    def to_json(self) -> dict:
        return {
            "parts": [list(map(int, p)) for p in self.parts],
            "eps_prime": self.params.eps,
            "C_prime": self.params.C,
            "eps": self.source_params.eps,
            "C": self.source_params.C,
        }


def greedy_maximal(s: PointSet, w: Weight, params: SeparationParams, candidates) -> list[int]:
    """Greedy maximal subfamily with pairwise disjoint disks.

    Candidates are visited by increasing weight, ties by ``(re, im)``; a
    point is accepted when its disk is disjoint from every accepted disk.
    """
    candidates = np.asarray(candidates, dtype=int)
    if len(candidates) == 0:
        return []
    z = s.points[candidates]
    p = _p(s, w)[candidates]
    order = np.lexsort((z.imag, z.real, p))
    radii = params.radii(s, w)[candidates]
    accepted: list[int] = []
    for k in order:
        if accepted:
            acc = np.asarray(accepted)
            d = pairwise_distances(s.metric, z[k : k + 1], z[acc])[0]
            if np.any(d < radii[k] + radii[acc]):
                continue
        accepted.append(int(k))
    return sorted(int(candidates[k]) for k in accepted)


def decompose(s: PointSet, w: Weight, params: SeparationParams, n: int) -> Decomposition:
    """Split ``s`` into ``n`` weakly separated parts.

    Requires ``count_condition(s, w, params) <= n``. Each part is a greedy
    maximal ``(eps', C')``-separated subfamily of what the previous parts
    left, with ``eps' = exp(-E0 C) eps / 2`` and ``C' = D0 C``. Trailing
    parts may be empty.
    """
    if n < 1:
        raise PreconditionError("n must be >= 1")
    count, center = count_condition(s, w, params, return_center=True)
    if count > n:
        z = s.points[center]
        raise PreconditionError(
            f"count condition {count} > n={n} in the disk around index {center}",
            witness={"center": center, "z": [z.real, z.imag], "count": count,
                     "radius": float(params.radii(s, w)[center])},
        )
    derived = params.derived(w)
    remaining = np.arange(len(s))
    parts = []
    for _ in range(n):
        part = greedy_maximal(s, w, derived, remaining)
        parts.append(part)
        remaining = np.setdiff1d(remaining, part)
    if len(remaining):
        # only reachable when the weight constants do not hold on this set
        raise VerificationError(
            f"{len(remaining)} points left after {n} parts; check the weight's (D0, E0)",
            witness=remaining.tolist(),
        )
    return Decomposition(parts, derived, params)


# -- counterexample family ------------------------------------------------------


@dataclass(frozen=True)
class Cluster:
    center: complex
    satellites: tuple  # sorted by increasing distance to the center
    scale: float  # 1/l


@dataclass
class ClusterFamily:
    clusters: list
    metric: Metric = Metric.PLANE
    C: float = 0.0

    def __len__(self):
        return len(self.clusters)

    def validate(self, w: Weight | None = None, n: int | None = None) -> None:
        for l, cl in enumerate(self.clusters, start=1):
            sat = np.asarray(cl.satellites, dtype=complex)
            if len(sat) == 0:
                raise PreconditionError(f"cluster {l} has no satellites")
            if n is not None and len(sat) < n:
                raise PreconditionError(f"cluster {l} has {len(sat)} satellites, need {n}")
            if len(set(sat.tolist())) != len(sat) or cl.center in set(sat.tolist()):
                raise PreconditionError(f"cluster {l} has coincident points")
            d = pairwise_distances(self.metric, np.array([cl.center]), sat)[0]
            if np.any(np.diff(d) < -1e-9 * d[1:]):  # equal radii differ by rounding
                raise PreconditionError(f"cluster {l} satellites not sorted by distance")
            if w is not None:
                lim = cl.scale * math.exp(-self.C * float(eval_weight(w, cl.center)))
                if np.any(d >= lim):
                    raise PreconditionError(f"cluster {l} satellite outside radius {lim:.3e}")

    def pointset(self) -> tuple[PointSet, list]:
        """All points (center then satellites per cluster) and per-cluster index lists."""
        pts, index = [], []
        for cl in self.clusters:
            start = len(pts)
            pts.append(cl.center)
            pts.extend(cl.satellites)
            index.append(list(range(start, len(pts))))
        return PointSet(np.array(pts, dtype=complex), self.metric), index

    def to_json(self) -> dict:
        return {
            "metric": self.metric.value,
            "C": self.C,
            "clusters": [
                {"center": [c.center.real, c.center.imag],
                 "satellites": [[s.real, s.imag] for s in c.satellites],
                 "scale": c.scale}
                for c in self.clusters
            ],
        }

    @classmethod
    def from_json(cls, data) -> "ClusterFamily":
        cl = [
            Cluster(complex(*c["center"]), tuple(complex(*s) for s in c["satellites"]), float(c["scale"]))
            for c in data["clusters"]
        ]
        return cls(cl, Metric.parse(data.get("metric", "plane")), float(data.get("C", 0.0)))


def counterexample_sequence(clusters: ClusterFamily, n: int) -> tuple[ValuedSet, list]:
    """Values with bounded order-(n-1) but unbounded order-n differences.

    ``ω(α) = Π_{j<n} (α - λ_j)`` at each center ``α`` (the product over its
    ``n-1`` nearest satellites) and ``ω = 0`` at every satellite. Returns
    the valued set and the per-cluster index lists ``[center, sat_1, ...]``.
    """
    if n < 1:
        raise PreconditionError("n must be >= 1")
    clusters.validate(n=n)
    s, index = clusters.pointset()
    vals = np.zeros(len(s), dtype=complex)
    for cl, idx in zip(clusters.clusters, index):
        sat = np.asarray(cl.satellites[: n - 1], dtype=complex)
        vals[idx[0]] = np.prod(cl.center - sat) if len(sat) else 1.0
    return ValuedSet(s, vals), index


def blowup_curve(v: ValuedSet, index: list, w: Weight, n: int, B: float) -> list[tuple[int, float]]:
    """``(l, |Δ^n ω(λ_1..λ_n, α)| exp(-B Σ p))`` for every cluster ``l``.

    Differences are Euclidean, matching the construction.
    """
    p = np.asarray(eval_weight(w, v.points), dtype=float)
    out = []
    for l, idx in enumerate(index, start=1):
        tup = list(idx[1 : n + 1]) + [idx[0]]
        d = divided_difference(v, tup, Metric.PLANE)
        out.append((l, abs(d) * math.exp(-B * p[tup].sum())))
    return out


def clusters_C(w: Weight, n: int, B: float) -> float:
    """Exponent ``B (n D0 + 1)`` that makes the blow-up survive the damping."""
    return B * (n * w.D0 + 1)
