"""Points, metrics and weights.

Points are plain Python/numpy complex numbers. A :class:`PointSet` is an
immutable ordered array of distinct points tagged with a :class:`Metric`:
the Euclidean plane or the unit disk with the pseudo-hyperbolic distance.

A :class:`Weight` bundles a weight function with the constants of its two
axioms, called ``w1`` and ``w2`` in reports: the logarithmic lower bound
``p(z) >= K ln(1+|z|^2)`` (disk: ``K ln(1/(1-|z|))``) and local slow
variation ``p(z) <= D0 p(w) + E0`` whenever ``d(z, w) <= r0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .errors import DomainError, SchemaError

ATOL = 1e-12


class Metric(str, enum.Enum):
    PLANE = "plane"
    DISK = "disk"

    @classmethod
    def parse(cls, value: "Metric | str") -> "Metric":
        try:
            return cls(value)
        except ValueError:
            raise SchemaError(f"unknown metric {value!r}; expected 'plane' or 'disk'") from None


def _check_domain(metric: Metric, z: np.ndarray) -> None:
    if not np.all(np.isfinite(z)):
        raise DomainError("point with non-finite coordinates")
    if metric is Metric.DISK and np.any(np.abs(z) >= 1.0):
        bad = np.flatnonzero(np.abs(np.atleast_1d(z)) >= 1.0)
        raise DomainError(f"disk metric requires |z| < 1 (offending index {int(bad[0])})")


def distance(metric: Metric | str, z: complex, w: complex) -> float:
    """Distance between two points: ``|z-w|`` or ``|z-w| / |1 - conj(w) z|``."""
    metric = Metric.parse(metric)
    z, w = complex(z), complex(w)
    _check_domain(metric, np.array([z, w]))
    return float(pairwise_distances(metric, np.array([z]), np.array([w]))[0, 0])


def pairwise_distances(metric: Metric, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance matrix ``d[i, j] = d(a[i], b[j])``.

    The disk denominator is built from its symmetric real part and
    antisymmetric imaginary part, so ``d(a, b)`` and ``d(b, a)`` agree bitwise.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ar, ai = a.real[:, None], a.imag[:, None]
    br, bi = b.real[None, :], b.imag[None, :]
    diff = np.hypot(ar - br, ai - bi)
    if Metric.parse(metric) is Metric.PLANE:
        return diff
    return diff / np.hypot(1.0 - (ar * br + ai * bi), ar * bi - ai * br)


def blaschke(beta: complex, z):
    """Blaschke factor ``(z - beta) / (1 - conj(beta) z)``."""
    return (z - beta) / (1.0 - np.conj(beta) * z)


def mobius(a: complex, z):
    """Involutive disk automorphism ``(a - z) / (1 - conj(a) z)``."""
    return (a - z) / (1.0 - np.conj(a) * z)


@dataclass(frozen=True, eq=False)
class PointSet:
    """Ordered, pairwise distinct points under a metric."""

    points: np.ndarray
    metric: Metric = Metric.PLANE

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex).reshape(-1)
        metric = Metric.parse(self.metric)
        _check_domain(metric, pts)
        dup = duplicate_indices(pts)
        if dup is not None:
            raise DomainError(f"points {dup[0]} and {dup[1]} coincide")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "metric", metric)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, idx):
        return self.points[idx]

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.metric is other.metric and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.metric, self.points.tobytes()))

    def subset(self, indices) -> "PointSet":
        return PointSet(self.points[np.asarray(indices, dtype=int)], self.metric)


def duplicate_indices(pts: np.ndarray) -> tuple[int, int] | None:
    """First pair of indices holding the same point, or None."""
    if len(pts) < 2:
        return None
    order = np.lexsort((pts.imag, pts.real))
    s = pts[order]
    same = np.flatnonzero(s[1:] == s[:-1])
    if len(same) == 0:
        return None
    i, j = sorted((int(order[same[0]]), int(order[same[0] + 1])))
    return i, j


@dataclass(frozen=True)
class GrowthBound:
    """The claim ``|g(z)| <= A exp(B p(z))``.

    ``A == 0`` is allowed: it is what a measured bound reports for a
    function that vanishes on every sampled node.
    """

    A: float
    B: float

    def __post_init__(self):
        if not (math.isfinite(self.A) and math.isfinite(self.B)) or self.A < 0 or self.B < 0:
            raise ValueError(f"invalid growth bound A={self.A}, B={self.B}")


WEIGHT_KINDS = ("log_one_plus_sq", "power_abs", "nonisotropic", "korenblum", "custom-table")


def _power_abs_K(a: float) -> float:
    r = np.logspace(-6, 6, 4001)
    return float(0.999 * np.min(r**a / np.log1p(r * r)))


def _default_constants(kind: str, params: Mapping[str, Any]) -> dict:
    if kind == "log_one_plus_sq":
        return {"K": 1.0, "D0": 2.0, "E0": 2.0, "metric": Metric.PLANE}
    if kind == "power_abs":
        a = float(params.get("a", 1.0))
        if a >= 1:
            D0, E0 = 2.0 ** (a - 1), 2.0 ** (a - 1)
        else:
            D0, E0 = 1.0, 1.0
        return {"K": _power_abs_K(a), "D0": D0, "E0": E0, "metric": Metric.PLANE}
    if kind == "nonisotropic":
        return {"K": 0.5, "D0": 1.0, "E0": 1.0 + math.log(2.0), "metric": Metric.PLANE}
    if kind == "korenblum":
        # rho <= 1/2 gives (1-|z|)/(1-|w|) >= 1/3
        return {"K": 1.0, "D0": 1.0, "E0": math.log(3.0), "metric": Metric.DISK}
    return {}


@dataclass(frozen=True)
class Weight:
    """A weight function with its axiom constants.

    ``kind`` is one of :data:`WEIGHT_KINDS`. ``params`` holds
    kind-specific data: ``{"a": float}`` for ``power_abs``; for
    ``custom-table`` either a radial table ``{"r": [...], "p": [...]}`` or
    a grid ``{"x": [...], "y": [...], "p": [[...]]}`` (``p[i][j]`` at
    ``x[i] + 1j*y[j]``), linearly interpolated.
    """

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    K: float = 1.0
    D0: float = 2.0
    E0: float = 2.0
    metric: Metric = Metric.PLANE
    r0: float = 1.0

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise SchemaError(f"unknown weight kind {self.kind!r}")
        object.__setattr__(self, "metric", Metric.parse(self.metric))
        if self.kind == "korenblum" and self.metric is not Metric.DISK:
            raise SchemaError("korenblum weight lives on the disk")
        if self.kind in ("log_one_plus_sq", "power_abs", "nonisotropic") and self.metric is not Metric.PLANE:
            raise SchemaError(f"{self.kind} weight lives on the plane")
        if not (self.K > 0 and self.D0 >= 1 and self.E0 >= 0 and self.r0 > 0):
            raise SchemaError(f"invalid weight constants K={self.K}, D0={self.D0}, E0={self.E0}, r0={self.r0}")
        if self.kind == "power_abs" and not float(self.params.get("a", 1.0)) > 0:
            raise SchemaError("power_abs needs a > 0")
        if self.kind == "custom-table":
            object.__setattr__(self, "_table", _build_table(self.params))

    @classmethod
    def make(cls, kind: str, **kw) -> "Weight":
        """Weight of ``kind`` with default constants, overridable by keyword."""
        params = kw.pop("params", {})
        base = _default_constants(kind, params)
        base.update(kw)
        metric = Metric.parse(base.get("metric", Metric.PLANE))
        base.setdefault("r0", 0.5 if metric is Metric.DISK else 1.0)
        return cls(kind=kind, params=params, **base)

    def __call__(self, z):
        return eval_weight(self, z)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "params": dict(self.params),
            "K": self.K,
            "D0": self.D0,
            "E0": self.E0,
            "metric": self.metric.value,
            "r0": self.r0,
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Weight":
        from .io import validate_weight_json

        validate_weight_json(data)
        return cls(
            kind=data["kind"],
            params=data.get("params", {}),
            K=float(data["K"]),
            D0=float(data["D0"]),
            E0=float(data["E0"]),
            metric=Metric.parse(data["metric"]),
            r0=float(data["r0"]),
        )


def _build_table(params: Mapping[str, Any]):
    from scipy.interpolate import RegularGridInterpolator

    if "r" in params:
        r = np.asarray(params["r"], dtype=float)
        p = np.asarray(params["p"], dtype=float)
        if r.ndim != 1 or r.shape != p.shape or len(r) < 2 or np.any(np.diff(r) <= 0):
            raise SchemaError("radial table needs increasing 'r' and matching 'p'")
        if np.any(p < 0):
            raise SchemaError("weight table values must be nonnegative")
        return ("radial", r, p)
    if {"x", "y", "p"} <= set(params):
        x = np.asarray(params["x"], dtype=float)
        y = np.asarray(params["y"], dtype=float)
        p = np.asarray(params["p"], dtype=float)
        if p.shape != (len(x), len(y)) or np.any(p < 0):
            raise SchemaError("grid table 'p' must have shape (len(x), len(y)) with nonnegative entries")
        return ("grid", RegularGridInterpolator((x, y), p, method="linear", bounds_error=True))
    raise SchemaError("custom-table params need {'r','p'} or {'x','y','p'}")


def eval_weight(w: Weight, z):
    """Evaluate the weight at a point or an array of points."""
    zz = np.asarray(z, dtype=complex)
    _check_domain(w.metric, zz)
    az = np.abs(zz)
    kind = w.kind
    if kind == "log_one_plus_sq":
        out = np.log1p(az * az)
    elif kind == "power_abs":
        out = az ** float(w.params.get("a", 1.0))
    elif kind == "nonisotropic":
        out = np.abs(zz.imag) + np.log1p(az)
    elif kind == "korenblum":
        out = -np.log1p(-az)
    else:
        table = w._table
        if table[0] == "radial":
            _, r, p = table
            if np.any(az < r[0]) or np.any(az > r[-1]):
                raise DomainError("point outside the weight table")
            out = np.interp(az, r, p)
        else:
            try:
                out = table[1](np.stack([zz.real.ravel(), zz.imag.ravel()], axis=-1)).reshape(zz.shape)
            except ValueError:
                raise DomainError("point outside the weight table") from None
    if np.ndim(out) == 0:
        return float(out)
    return out


def w1_floor(w: Weight, z):
    """The logarithmic lower bound ``K ln(1+|z|^2)`` or ``K ln(1/(1-|z|))``."""
    az = np.abs(np.asarray(z, dtype=complex))
    if w.metric is Metric.PLANE:
        return w.K * np.log1p(az * az)
    return -w.K * np.log1p(-az)


@dataclass
class AxiomReport:
    w1_ok: bool
    w2_ok: bool
    witnesses: dict
    pairs_checked: int = 0

    @property
    def ok(self) -> bool:
        return self.w1_ok and self.w2_ok

    def to_json(self) -> dict:
        return {
            "w1_ok": self.w1_ok,
            "w2_ok": self.w2_ok,
            "pairs_checked": self.pairs_checked,
            "witnesses": self.witnesses,
        }


def certify_weight_axioms(w: Weight, sample: PointSet, pair_radius: float | None = None,
                          D0: float | None = None, E0: float | None = None) -> AxiomReport:
    """Check the lower bound at every sample point and slow variation on every sampled pair.

    Pairs are ordered pairs of distinct sample points at distance at most
    ``pair_radius`` (default ``w.r0``). ``D0``/``E0`` override the stored
    constants. The first violation of each axiom is returned as witness.
    """
    if len(sample) == 0:
        raise ValueError("empty sample")
    pair_radius = w.r0 if pair_radius is None else pair_radius
    D0 = w.D0 if D0 is None else D0
    E0 = w.E0 if E0 is None else E0
    z = sample.points
    p = np.asarray(eval_weight(w, z), dtype=float).reshape(-1)
    witnesses: dict = {}

    floor = np.asarray(w1_floor(w, z)).reshape(-1)
    bad = np.flatnonzero(p < floor - ATOL)
    w1_ok = len(bad) == 0
    if not w1_ok:
        i = int(bad[0])
        witnesses["w1"] = {"index": i, "z": [z[i].real, z[i].imag], "p": p[i], "bound": float(floor[i])}

    w2_ok = True
    checked = 0
    for i in range(len(z)):
        d = pairwise_distances(sample.metric, z[i:i + 1], z)[0]
        near = np.flatnonzero(d <= pair_radius)
        near = near[near != i]
        checked += len(near)
        viol = near[p[i] > D0 * p[near] + E0 + ATOL]
        if len(viol):
            j = int(viol[0])
            w2_ok = False
            witnesses["w2"] = {
                "z": [z[i].real, z[i].imag],
                "w": [z[j].real, z[j].imag],
                "p_z": p[i],
                "bound": D0 * p[j] + E0,
            }
            break
    return AxiomReport(w1_ok, w2_ok, witnesses, checked)


def grid_sample(radius: float, step: float, metric: Metric = Metric.PLANE) -> PointSet:
    """Square grid of points with ``|z| <= radius`` (and ``|z| < 1`` on the disk)."""
    xs = np.arange(-radius, radius + step / 2, step)
    zz = (xs[:, None] + 1j * xs[None, :]).ravel()
    keep = np.abs(zz) <= radius
    if metric is Metric.DISK:
        keep &= np.abs(zz) < 1
    return PointSet(zz[keep], metric)
