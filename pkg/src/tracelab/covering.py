"""Inductive disk covering of a union of weakly separated parts.

Stage 1 takes the first part as centers with radius ``eps e^{-C p}/4``.
Stage ``k+1`` inflates every center disk by
``δ_k(λ) = 2^{-3k-2} eps e^{-C_k p(λ) - B_k}``; centers whose inflated disk
meets the next part keep the inflation (M1) and capture those points (N1),
the others keep their radius (M2), and uncaptured points of the next part
become new centers (N2) with radius ``2^{-3k-3} eps e^{-C_{k+1} p - B_{k+1}}``.

Disks are open. On the disk metric every distance is pseudo-hyperbolic and
``dist(D, D') = ρ(λ, λ') - r - r'``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Metric, PointSet, Weight, eval_weight, pairwise_distances
from .errors import PreconditionError, VerificationError

TOL_III = 1e-12
REL_II = 1e-12


@dataclass(frozen=True)
class StageConstants:
    C: tuple
    B: tuple

    def __len__(self):
        return len(self.C)

    def check(self, w: Weight, pairs_p: np.ndarray) -> list:
        """Violations of ``C_k p + B_k <= C_{k+1} p' + B_{k+1}`` over ``(p, p')`` rows."""
        bad = []
        for k in range(len(self.C) - 1):
            lhs = self.C[k] * pairs_p[:, 0] + self.B[k]
            rhs = self.C[k + 1] * pairs_p[:, 1] + self.B[k + 1]
            idx = np.flatnonzero(lhs > rhs + 1e-12)
            bad.extend((k + 1, int(i)) for i in idx)
        return bad


def stage_constants(w: Weight, C: float, n: int) -> StageConstants:
    """``C_1 = C, B_1 = 0, C_{k+1} = D0 C_k, B_{k+1} = B_k + C_k E0``."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    Cs, Bs = [float(C)], [0.0]
    for _ in range(n - 1):
        Bs.append(Bs[-1] + Cs[-1] * w.E0)
        Cs.append(Cs[-1] * w.D0)
    return StageConstants(tuple(Cs), tuple(Bs))


@dataclass
class Stage:
    k: int
    C_k: float
    B_k: float
    centers: list
    radii: list
    M1: list = field(default_factory=list)
    N1: list = field(default_factory=list)
    M2: list = field(default_factory=list)
    N2: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"k": self.k, "C_k": self.C_k, "B_k": self.B_k, "centers": self.centers,
                "radii": self.radii, "M1": self.M1, "N1": self.N1, "M2": self.M2, "N2": self.N2}


@dataclass
class Covering:
    """Centers (indices into ``points``), radii and the constants of the covering.

    ``assignment[i]`` is the center whose disk contains point ``i``.
    """

    points: PointSet
    parts: list
    centers: list
    radii: np.ndarray
    a: float
    b: float
    B1: float
    B2: float
    eps: float
    C: float
    trace: list = field(default_factory=list)
    assignment: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.parts)

    def radius_of(self) -> dict:
        return {int(c): float(r) for c, r in zip(self.centers, self.radii)}

    def members(self, center: int) -> list:
        """Indices in the disk of ``center``, ordered by part."""
        if self.assignment is None:
            raise VerificationError("covering has no assignment")
        label = part_labels(self.parts, len(self.points))
        idx = np.flatnonzero(self.assignment == center)
        return sorted(idx.tolist(), key=lambda i: (label[i], i))

    def constants(self) -> dict:
        return {"a": self.a, "b": self.b, "B1": self.B1, "B2": self.B2,
                "eps": self.eps, "C": self.C}

    def to_json(self) -> dict:
        return {
            "centers": [int(c) for c in self.centers],
            "radii": [float(r) for r in self.radii],
            "constants": self.constants(),
            "parts": [list(map(int, p)) for p in self.parts],
            "assignment": None if self.assignment is None else self.assignment.tolist(),
            "trace": [s.to_json() for s in self.trace],
        }

    @classmethod
    def from_json(cls, data, points: PointSet) -> "Covering":
        c = data["constants"]
        asg = data.get("assignment")
        return cls(points, [list(p) for p in data["parts"]], list(data["centers"]),
                   np.asarray(data["radii"], dtype=float), c["a"], c["b"], c["B1"], c["B2"],
                   c["eps"], c["C"], [], None if asg is None else np.asarray(asg, dtype=int))


def part_labels(parts, size: int) -> np.ndarray:
    label = np.full(size, -1, dtype=int)
    for j, part in enumerate(parts):
        label[np.asarray(part, dtype=int)] = j
    return label


def _check_parts(points: PointSet, parts) -> list:
    parts = [sorted(int(i) for i in p) for p in parts]
    flat = [i for p in parts for i in p]
    if len(flat) != len(set(flat)):
        raise PreconditionError("parts overlap")
    if flat and (min(flat) < 0 or max(flat) >= len(points)):
        raise PreconditionError("part index out of range")
    if len(flat) != len(points):
        raise PreconditionError(f"parts cover {len(flat)} of {len(points)} points")
    return parts


def union_parts(parts: list) -> tuple[PointSet, list]:
    """Join parts given as point sets into one set plus index lists."""
    if not parts:
        raise PreconditionError("no parts")
    metric = parts[0].metric
    pts, index = [], []
    for p in parts:
        if p.metric is not metric:
            raise PreconditionError("parts use different metrics")
        index.append(list(range(len(pts), len(pts) + len(p))))
        pts.extend(p.points.tolist())
    return PointSet(np.asarray(pts, dtype=complex), metric), index


def separation_precondition(points: PointSet, parts, w: Weight, eps: float, C: float):
    """First pair inside a part with ``d < eps e^{-(C/D0)(min p - E0)}``, or None."""
    p = np.asarray(eval_weight(w, points.points), dtype=float)
    for j, part in enumerate(parts):
        idx = np.asarray(part, dtype=int)
        if len(idx) < 2:
            continue
        z = points.points[idx]
        d = pairwise_distances(points.metric, z, z)
        pm = np.minimum(p[idx][:, None], p[idx][None, :])
        need = eps * np.exp(-(C / w.D0) * (pm - w.E0))
        np.fill_diagonal(d, np.inf)
        bad = np.argwhere(d < need)
        if len(bad):
            a, b = bad[0]
            return j, int(idx[a]), int(idx[b]), float(d[a, b]), float(need[a, b])
    return None


def build_covering(points: PointSet, parts, w: Weight, eps: float, C: float,
                   check: bool = True) -> Covering:
    """Run the stage construction on ``parts`` (index lists into ``points``).

    Parts are processed in the given order. With ``check=True`` the result
    is verified and a failing clause raises :class:`VerificationError`.
    """
    parts = _check_parts(points, parts)
    n = len(parts)
    if n < 1:
        raise PreconditionError("need at least one part")
    if not 0 < eps <= 1:
        raise PreconditionError(f"eps must lie in (0, 1], got {eps}")
    if C < 0:
        raise PreconditionError("C must be nonnegative")
    bad = separation_precondition(points, parts, w, eps, C)
    if bad is not None:
        j, i1, i2, d, need = bad
        raise PreconditionError(
            f"part {j} pair ({i1}, {i2}) at distance {d:.6g} < required {need:.6g}",
            witness={"part": j, "pair": [i1, i2], "distance": d, "required": need},
        )
    sc = stage_constants(w, C, n)
    z = points.points
    p = np.asarray(eval_weight(w, z), dtype=float)
    metric = points.metric

    centers = list(parts[0])
    radii = {c: eps * math.exp(-C * p[c]) / 4.0 for c in centers}
    owner = {c: c for c in centers}
    trace = [Stage(1, sc.C[0], sc.B[0], list(centers), [radii[c] for c in centers])]
    for k in range(1, n):
        Ck, Bk = sc.C[k - 1], sc.B[k - 1]
        nxt = np.asarray(parts[k], dtype=int)
        cidx = np.asarray(centers, dtype=int)
        infl = np.array([2.0 ** (-3 * k - 2) * eps * math.exp(-Ck * p[c] - Bk) for c in centers])
        R = np.array([radii[c] for c in centers])
        if len(nxt) and len(cidx):
            d = pairwise_distances(metric, z[cidx], z[nxt])
            hit = d < (R + infl)[:, None]
        else:
            hit = np.zeros((len(cidx), len(nxt)), dtype=bool)
        m1_mask = hit.any(axis=1)
        n1_mask = hit.any(axis=0)
        M1 = [int(c) for c in cidx[m1_mask]]
        M2 = [int(c) for c in cidx[~m1_mask]]
        N1 = [int(b) for b in nxt[n1_mask]]
        N2 = [int(b) for b in nxt[~n1_mask]]
        for row, c in enumerate(centers):
            if m1_mask[row]:
                radii[c] = radii[c] + infl[row]
        for col, b in enumerate(nxt):
            if n1_mask[col]:
                # first capturing center in center order
                owner[int(b)] = int(cidx[np.argmax(hit[:, col])])
        C1, B1 = sc.C[k], sc.B[k]
        for b in N2:
            radii[b] = 2.0 ** (-3 * k - 3) * eps * math.exp(-C1 * p[b] - B1)
            owner[b] = b
        centers = centers + N2
        trace.append(Stage(k + 1, C1, B1, list(centers), [radii[c] for c in centers],
                           M1, N1, M2, N2))

    r = np.array([radii[c] for c in centers])
    cov = Covering(points, parts, centers, r, a=2.0 ** (-3 * n) * math.exp(-sc.B[-1]), b=2.0 / 7.0,
                   B1=sc.C[-1], B2=float(C), eps=float(eps), C=float(C), trace=trace)
    cov.assignment = _assign(cov)
    if check:
        rep = verify_covering(cov, parts, w)
        if not rep.ok:
            raise VerificationError(f"covering clause {rep.first_failure()} failed", witness=rep.to_json())
    return cov


def _assign(cov: Covering) -> np.ndarray:
    """Index of the (first) center whose disk contains each point, -1 if none."""
    z = cov.points.points
    out = np.full(len(z), -1, dtype=int)
    if not cov.centers:
        return out
    cidx = np.asarray(cov.centers, dtype=int)
    d = pairwise_distances(cov.points.metric, z[cidx], z)
    inside = d < np.asarray(cov.radii)[:, None]
    has = inside.any(axis=0)
    out[has] = cidx[np.argmax(inside[:, has], axis=0)]
    return out


@dataclass
class ClauseResult:
    name: str
    ok: bool
    witness: object = None

    def to_json(self):
        return {"clause": self.name, "ok": self.ok, "witness": self.witness}


@dataclass
class CoveringReport:
    clauses: list
    stages: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.clauses) and all(s.ok for s in self.stages)

    def first_failure(self):
        for c in self.clauses + self.stages:
            if not c.ok:
                return c.name
        return None

    def to_json(self) -> dict:
        return {"ok": self.ok, "clauses": [c.to_json() for c in self.clauses],
                "stages": [s.to_json() for s in self.stages]}


def verify_covering(cov: Covering, parts, w: Weight) -> CoveringReport:
    """Check the four covering clauses and, when a trace is present, the per-stage radius bounds.

    Clauses: ``i`` every point lies in a disk; ``ii`` ``a eps e^{-B1 p} <= r <= b eps e^{-B2 p}``;
    ``iii`` distinct disks are at least ``a eps e^{-B1 min p}`` apart; ``iv`` no disk holds two
    points of one part.
    """
    z = cov.points.points
    metric = cov.points.metric
    p = np.asarray(eval_weight(w, z), dtype=float)
    cidx = np.asarray(cov.centers, dtype=int)
    r = np.asarray(cov.radii, dtype=float)
    union = np.asarray(sorted(i for part in parts for i in part), dtype=int)
    clauses = []

    # (i) coverage
    if len(cidx):
        inside = pairwise_distances(metric, z[cidx], z) < r[:, None]
    else:
        inside = np.zeros((0, len(z)), dtype=bool)
    covered = inside.any(axis=0) if len(cidx) else np.zeros(len(z), dtype=bool)
    miss = [int(i) for i in union if not covered[i]]
    clauses.append(ClauseResult("i", not miss, {"uncovered": miss[0]} if miss else None))

    # (ii) radius bounds
    pc = p[cidx]
    lo = cov.a * cov.eps * np.exp(-cov.B1 * pc)
    hi = cov.b * cov.eps * np.exp(-cov.B2 * pc)
    # relative slack absorbs the rounding of equal closed forms
    bad = np.flatnonzero((r < lo * (1 - REL_II)) | (r > hi * (1 + REL_II)) | ~(r > 0))
    clauses.append(ClauseResult("ii", len(bad) == 0, None if len(bad) == 0 else
                                {"center": int(cidx[bad[0]]), "r": float(r[bad[0]]),
                                 "lo": float(lo[bad[0]]), "hi": float(hi[bad[0]])}))

    # (iii) gaps between distinct disks
    wit = None
    if len(cidx) > 1:
        d = pairwise_distances(metric, z[cidx], z[cidx])
        gap = d - r[:, None] - r[None, :]
        need = cov.a * cov.eps * np.exp(-cov.B1 * np.minimum(pc[:, None], pc[None, :]))
        slack = gap - need
        np.fill_diagonal(slack, np.inf)
        i, j = np.unravel_index(np.argmin(slack), slack.shape)
        if slack[i, j] < -TOL_III:
            wit = {"pair": [int(cidx[i]), int(cidx[j])], "gap": float(gap[i, j]),
                   "required": float(need[i, j])}
    clauses.append(ClauseResult("iii", wit is None, wit))

    # (iv) at most one point of each part per disk
    wit = None
    for j, part in enumerate(parts):
        if not len(part) or not len(cidx):
            continue
        cnt = inside[:, np.asarray(part, dtype=int)].sum(axis=1)
        k = int(np.argmax(cnt))
        if cnt[k] > 1:
            wit = {"center": int(cidx[k]), "part": j, "count": int(cnt[k])}
            break
    clauses.append(ClauseResult("iv", wit is None, wit))

    stages = []
    for st in cov.trace:
        c = np.asarray(st.centers, dtype=int)
        R = np.asarray(st.radii, dtype=float)
        lo = 2.0 ** (-3 * st.k) * np.exp(-st.C_k * p[c] - st.B_k) * cov.eps
        hi = (2.0 / 7.0) * np.exp(-cov.C * p[c]) * cov.eps
        bad = np.flatnonzero((R < lo * (1 - REL_II)) | (R > hi * (1 + REL_II)))
        stages.append(ClauseResult(f"stage{st.k}", len(bad) == 0, None if len(bad) == 0 else
                                   {"center": int(c[bad[0]]), "R": float(R[bad[0]])}))
    return CoveringReport(clauses, stages)


def params_for_parts(eps_sep: float, C_sep: float, w: Weight) -> tuple[float, float]:
    """Covering ``(eps, C)`` whose precondition follows from ``(eps_sep, C_sep)`` separation.

    With ``C = D0 C_sep`` and ``eps = eps_sep e^{-C_sep E0}`` the required gap
    ``eps e^{-(C/D0)(p - E0)}`` equals ``eps_sep e^{-C_sep p}``, which weak
    separation already guarantees.
    """
    return min(1.0, eps_sep * math.exp(-C_sep * w.E0)), w.D0 * C_sep
