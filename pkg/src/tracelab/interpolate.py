"""Extension of part values and the explicit interpolant assembly.

For a covering with centers ``λ`` the interpolant is

    f = Σ_λ F_λ G_λ P_λ exp(-D p(λ))

where ``F_λ`` is 1 on the disk of ``λ`` and 0 on every other disk, ``G_λ``
equals ``exp(D p(λ))`` on the disk of ``λ`` and ``P_λ`` is the Newton
polynomial of the values inside that disk. On disk instances every linear
factor ``z - β`` becomes the Blaschke factor ``(z - β)/(1 - conj(β) z)``.

The non-constructive interpolation step is an oracle: barycentric
Lagrange interpolation on the requested nodes, or a constant for a single
node. Growth is measured on grids, not certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import GrowthBound, Metric, PointSet, Weight, eval_weight
from .covering import Covering, part_labels
from .divdiff import ValuedSet, blaschke_newton_coefficients, newton_coefficients
from .errors import ConditioningError, PreconditionError, VerificationError
from .expr import (Barycentric, Const, FunctionExpr, Newton, Product, Scaled, Sum,
                   basis_factor)

LEBESGUE_MAX = 1e12
GRID = 24
MAX_POINTS = 200
MAX_PART = 100
MAX_N = 4


# -- oracle -----------------------------------------------------------------------


@dataclass
class OracleRequest:
    nodes: np.ndarray
    values: np.ndarray
    target: GrowthBound | None = None
    metric: Metric = Metric.PLANE

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=complex).reshape(-1)
        self.values = np.asarray(self.values, dtype=complex).reshape(-1)
        if len(self.nodes) != len(self.values):
            raise PreconditionError("nodes and values differ in length")
        if len(self.nodes) == 0:
            raise PreconditionError("empty oracle request")
        if len(np.unique(self.nodes)) != len(self.nodes):
            raise PreconditionError("oracle nodes are not distinct")
        if not np.all(np.isfinite(self.values)):
            raise PreconditionError("non-finite oracle value")


@dataclass
class OracleReport:
    lebesgue: float
    growth: float | None = None  # sup |f| e^{-B' p} on the grid, when a target is given


def evaluation_grid(nodes, metric: Metric = Metric.PLANE, size: int = GRID, pad: float = 0.1):
    """``size x size`` grid over the padded bounding box of ``nodes``.

    On the disk the grid is clipped to ``|z| < 1``.
    """
    z = np.asarray(nodes, dtype=complex).reshape(-1)
    x0, x1 = z.real.min(), z.real.max()
    y0, y1 = z.imag.min(), z.imag.max()
    span = max(x1 - x0, y1 - y0, 1e-3)
    x = np.linspace(x0 - pad * span, x1 + pad * span, size)
    y = np.linspace(y0 - pad * span, y1 + pad * span, size)
    g = (x[None, :] + 1j * y[:, None]).reshape(-1)
    if metric is Metric.DISK:
        g = g[np.abs(g) < 1.0]
    return g


def oracle_interpolate(req: OracleRequest, w: Weight | None = None, return_report: bool = False):
    """Exact interpolant of ``req`` (constant for one node, barycentric otherwise).

    Raises :class:`ConditioningError` when the Lebesgue function on the
    evaluation grid exceeds ``LEBESGUE_MAX``.
    """
    if len(req.nodes) == 1:
        f: FunctionExpr = Const(req.values[0])
        leb = 1.0
    else:
        f = Barycentric(req.nodes, req.values)
        leb = f.lebesgue(evaluation_grid(req.nodes, req.metric))
        if not leb <= LEBESGUE_MAX:
            raise ConditioningError(
                f"Lebesgue constant {leb:.3g} over {len(req.nodes)} nodes exceeds "
                f"{LEBESGUE_MAX:.0e}; use a smaller instance")
    if not return_report:
        return f
    growth = None
    if req.target is not None and w is not None:
        g = np.concatenate([evaluation_grid(req.nodes, req.metric), req.nodes])
        growth = float(np.max(np.abs(f(g)) * np.exp(-req.target.B * eval_weight(w, g))))
    return f, OracleReport(leb, growth)


# -- extension --------------------------------------------------------------------


def extend_values(values_j, cov: Covering, j: int) -> ValuedSet:
    """Extend values on part ``j`` to all points, constant on every disk.

    A point gets ``ω(α)`` when its disk meets part ``j`` in ``{α}`` and 0
    when the disk misses part ``j``.
    """
    part = np.asarray(cov.parts[j], dtype=int)
    values_j = np.asarray(values_j, dtype=complex).reshape(-1)
    if len(values_j) != len(part):
        raise PreconditionError(f"{len(values_j)} values for part of size {len(part)}")
    asg = cov.assignment
    if asg is None or np.any(asg < 0):
        bad = None if asg is None else int(np.flatnonzero(asg < 0)[0])
        raise VerificationError("point outside every disk", witness=bad)
    by_center: dict[int, complex] = {}
    for idx, val in zip(part, values_j):
        c = int(asg[idx])
        if c in by_center:
            raise VerificationError(f"disk {c} meets part {j} twice", witness=c)
        by_center[c] = val
    out = np.array([by_center.get(int(c), 0.0) for c in asg], dtype=complex)
    return ValuedSet(cov.points, out)


# -- per-center components ----------------------------------------------------------


def newton_polynomial(nodes, values, blaschke: bool = False) -> Newton:
    """Newton form through ``(nodes[i], values[i])`` in the given order."""
    nodes = np.asarray(nodes, dtype=complex).reshape(-1)
    if len(nodes) == 0:
        raise PreconditionError("empty disk")
    if blaschke:
        c = blaschke_newton_coefficients(nodes, values)
    else:
        c = newton_coefficients(nodes, values)
    return Newton(c, nodes, blaschke=blaschke)


def _node_product(z, betas, blaschke: bool):
    z = np.asarray(z, dtype=complex)
    out = np.ones(z.shape, dtype=complex)
    for b in betas:
        out = out * ((z - b) / (1.0 - np.conj(b) * z) if blaschke else z - b)
    return out


def build_F(cov: Covering, center: int, w: Weight | None = None) -> FunctionExpr:
    """``Π_j [1 - Π_{β in disk}(z - β) f_j(z)]`` with ``f_j`` from the oracle.

    ``f_j`` interpolates ``Π_β (α - β)^{-1}`` at the points of part ``j``
    outside the disk; the (at most one) point of part ``j`` inside the disk
    is left out since the bracket vanishes there anyway.
    """
    z = cov.points.points
    blaschke = cov.points.metric is Metric.DISK
    members = cov.members(center)
    betas = z[members]
    inner = Product([basis_factor(b, blaschke) for b in betas])
    asg = cov.assignment
    factors = []
    for part in cov.parts:
        part = np.asarray(part, dtype=int)
        outside = part[asg[part] != center]
        if len(outside) == 0:
            continue
        vals = 1.0 / _node_product(z[outside], betas, blaschke)
        fj = oracle_interpolate(OracleRequest(z[outside], vals, metric=cov.points.metric), w)
        factors.append(Const(1.0) - inner * fj)
    if not factors:
        return Const(1.0)
    return Product(factors)


def build_G(cov: Covering, center: int, D: float, w: Weight) -> FunctionExpr:
    """``H_k = H_{k-1} + h_k Π_{i<k} (z - α_i)`` with constant oracle outputs ``h_k``."""
    z = cov.points.points
    blaschke = cov.points.metric is Metric.DISK
    alphas = z[cov.members(center)]
    target = math.exp(D * float(eval_weight(w, z[center])))
    hs: list = []
    H: FunctionExpr | None = None
    for k, a in enumerate(alphas):
        prev = 0j if H is None else complex(H(a))
        node_val = (target - prev) / complex(_node_product(a, alphas[:k], blaschke))
        h = oracle_interpolate(OracleRequest([a], [node_val], metric=cov.points.metric))
        hs.append(complex(h(a)))
        H = Newton(hs, alphas, blaschke=blaschke)
    return H


# -- assembly ---------------------------------------------------------------------


@dataclass
class CenterTerm:
    center: int
    members: list
    P: FunctionExpr
    F: FunctionExpr
    G: FunctionExpr
    scale: float  # exp(-D p(λ))

    def expr(self) -> FunctionExpr:
        return Scaled(self.scale, Product([self.F, self.G, self.P]))

    def describe(self) -> dict:
        return {"center": self.center, "members": self.members, "scale": self.scale,
                "P": self.P.describe(), "F": self.F.describe(), "G": self.G.describe()}


@dataclass
class InterpolantBundle:
    covering: Covering
    terms: list
    D: float
    f: FunctionExpr
    residuals: np.ndarray
    leakage: np.ndarray
    growth: dict = field(default_factory=dict)
    damped_sum: float = 0.0

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if len(self.residuals) else 0.0

    @property
    def max_leakage(self) -> float:
        return float(self.leakage.max()) if len(self.leakage) else 0.0

    def to_json(self) -> dict:
        worst = int(np.argmax(self.residuals)) if len(self.residuals) else None
        return {
            "D": self.D,
            "max_residual": self.max_residual,
            "worst_point": worst,
            "max_leakage": self.max_leakage,
            "residuals": self.residuals.tolist(),
            "damped_sum": self.damped_sum,
            "growth": self.growth,
            "centers": [t.describe() for t in self.terms],
        }


def _check_size(cov: Covering) -> None:
    if len(cov.points) > MAX_POINTS:
        raise ConditioningError(f"|Λ| = {len(cov.points)} exceeds {MAX_POINTS}")
    if cov.n > MAX_N:
        raise ConditioningError(f"n = {cov.n} exceeds {MAX_N}")
    big = max((len(p) for p in cov.parts), default=0)
    if big > MAX_PART:
        raise ConditioningError(f"part size {big} exceeds {MAX_PART}")


def resolve_D(D, w: Weight, B: float = 1.0) -> float:
    """``D`` as given, or ``B + 2/K`` for ``"auto"``.

    With ``C = 2/K`` the lower bound on ``p`` gives ``exp(-C p) <= (1+|z|^2)^{-2}``, so the
    damped series converges on separated sets.
    """
    if D == "auto":
        return float(B) + 2.0 / w.K
    D = float(D)
    if D < 0:
        raise PreconditionError("D must be nonnegative")
    return D


def growth_table(f: FunctionExpr, nodes, w: Weight, metric: Metric) -> dict:
    """``{floor(p): max |f|}`` over the evaluation grid and the nodes."""
    g = np.concatenate([evaluation_grid(nodes, metric), np.asarray(nodes, dtype=complex)])
    vals = np.abs(f(g))
    levels = np.floor(np.asarray(eval_weight(w, g), dtype=float)).astype(int)
    return {str(int(k)): float(vals[levels == k].max()) for k in np.unique(levels)}


def assemble(omega: ValuedSet, cov: Covering, w: Weight, D=0.0, B: float = 1.0,
             tol: float = 1e-6, check: bool = True) -> InterpolantBundle:
    """Build ``f`` and measure residuals and foreign-term leakage.

    Residuals and leakage are relative to ``1 + |ω(α)|``. With ``check``
    a residual above ``tol`` raises :class:`VerificationError` naming the
    worst point.
    """
    if omega.pointset != cov.points:
        raise PreconditionError("values and covering use different point sets")
    _check_size(cov)
    D = resolve_D(D, w, B)
    z = cov.points.points
    blaschke = cov.points.metric is Metric.DISK
    p = np.asarray(eval_weight(w, z), dtype=float)
    terms = []
    for c in cov.centers:
        c = int(c)
        members = cov.members(c)
        P = newton_polynomial(z[members], omega.values[members], blaschke)
        F = build_F(cov, c, w)
        G = build_G(cov, c, D, w)
        terms.append(CenterTerm(c, members, P, F, G, math.exp(-D * p[c])))
    f = Sum([t.expr() for t in terms])

    # per-point evaluation of every term; own term on the diagonal of assignment
    M = np.array([t.expr()(z) for t in terms]) if terms else np.zeros((0, len(z)), complex)
    cidx = {t.center: k for k, t in enumerate(terms)}
    own = np.array([cidx[int(c)] for c in cov.assignment])
    fz = M.sum(axis=0)
    denom = 1.0 + np.abs(omega.values)
    residuals = np.abs(fz - omega.values) / denom
    absM = np.abs(M)
    foreign = absM.sum(axis=0) - absM[own, np.arange(len(z))]
    leakage = foreign / denom
    damped = float(np.sum(np.exp((B - D) * p[np.asarray(cov.centers, dtype=int)])))
    bundle = InterpolantBundle(cov, terms, D, f, residuals, leakage,
                               growth_table(f, z, w, cov.points.metric), damped)
    if check and bundle.max_residual > tol:
        worst = int(np.argmax(residuals))
        raise VerificationError(
            f"residual {bundle.max_residual:.3e} at point {worst} exceeds {tol:.0e}",
            witness={"point": worst, "residual": bundle.max_residual})
    return bundle


# -- end to end -----------------------------------------------------------------


@dataclass
class TraceReport:
    sufficiency: list
    necessity: list
    tol: float

    @property
    def ok(self) -> bool:
        return all(r <= self.tol for r in self.sufficiency + self.necessity)

    def to_json(self) -> dict:
        return {"ok": self.ok, "tol": self.tol, "sufficiency": self.sufficiency,
                "necessity": self.necessity}


def random_values(rng: np.random.Generator, s: PointSet, w: Weight) -> np.ndarray:
    """Values with ``|ω(λ)| <= e^{p(λ)}``."""
    p = np.asarray(eval_weight(w, s.points), dtype=float)
    r = np.sqrt(rng.random(len(s)))
    return r * np.exp(2j * np.pi * rng.random(len(s))) * np.exp(p)


def verify_trace_theorem(cov: Covering, w: Weight, trials: int, seed: int = 0,
                         D=0.0, tol: float = 1e-6) -> TraceReport:
    """Sufficiency: random ``ω`` on all points is reproduced by ``assemble``.

    Necessity: random values on one part (cycling through the parts) are
    extended to all points and reproduced on that part.
    """
    rng = np.random.default_rng(seed)
    suff, nec = [], []
    for t in range(trials):
        omega = ValuedSet(cov.points, random_values(rng, cov.points, w))
        suff.append(assemble(omega, cov, w, D=D, check=False).max_residual)
        j = t % cov.n
        part = np.asarray(cov.parts[j], dtype=int)
        vj = random_values(rng, cov.points.subset(part), w) if len(part) else np.empty(0, complex)
        ext = extend_values(vj, cov, j)
        b = assemble(ext, cov, w, D=D, check=False)
        if len(part):
            got = b.f(cov.points.points[part])
            nec.append(float(np.max(np.abs(got - vj) / (1 + np.abs(vj)))))
        else:
            nec.append(0.0)
    return TraceReport(suff, nec, tol)
