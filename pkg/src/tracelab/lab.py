"""Scenario generators and the experiment runner.

Every scenario is generated from a numpy ``Generator`` seeded with
``[seed, ...]``; reports record the generator algorithm and contain no
timings, so two runs with equal arguments produce identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Metric, PointSet, Weight, eval_weight
from .covering import build_covering, params_for_parts, verify_covering
from .divdiff import (ValuedSet, contour_oracle, divided_difference, divided_differences,
                      rel_err)
from .errors import PreconditionError, TraceLabError
from .expr import Analytic, BlaschkeFactor, Product, Sum
from .interpolate import assemble, extend_values, random_values
from .separation import (Cluster, ClusterFamily, SeparationParams, blowup_curve,
                         clusters_C, count_condition, counterexample_sequence, decompose,
                         is_weakly_separated, max_eps)

SCHEMA = "trace-lab/1"
PRNG = "numpy.random.PCG64"
KINDS = ("lattice", "perturbed_lattice", "radial_disk", "clustered", "union_of_separated")
SUITES = ("equiv", "cover", "trace", "hyperbolic")
TINY = 1e-300

DEFAULTS = {
    "lattice": {"step": 3.0, "extent": 9.0},
    "perturbed_lattice": {"step": 3.0, "extent": 9.0, "jitter": 0.1},
    "radial_disk": {"rings": 3, "m": 2},
    "clustered": {"n": 2, "L": 5, "B": 1.0},
    "union_of_separated": {"n": 2, "base": "lattice", "step": 3.0, "extent": 9.0,
                           "jitter": 0.1, "offset": 0.05, "rings": 3, "m": 2},
}


@dataclass(frozen=True)
class Scenario:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PreconditionError(f"unknown scenario kind {self.kind!r}")
        merged = dict(DEFAULTS[self.kind])
        unknown = set(self.params) - set(merged)
        if unknown:
            raise PreconditionError(f"unknown parameters for {self.kind}: {sorted(unknown)}")
        merged.update(self.params)
        object.__setattr__(self, "params", merged)

    def rng(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed))


@dataclass
class Generated:
    points: PointSet
    parts: list | None = None
    clusters: ClusterFamily | None = None


def _grid(step, extent):
    c = np.arange(0.0, extent + step / 2, step)
    return (c[None, :] + 1j * c[:, None]).reshape(-1)


def _rings(rng, rings, m):
    pts = []
    for k in range(1, int(rings) + 1):
        r = 1.0 - 2.0 ** (-k)
        cnt = int(m) * 2**k
        phase = rng.random() * 2 * np.pi / cnt
        pts.append(r * np.exp(1j * (phase + 2 * np.pi * np.arange(cnt) / cnt)))
    return np.concatenate(pts)


def generate(s: Scenario, w: Weight | None = None) -> Generated:
    """Points of the scenario plus part or cluster annotations."""
    prm = s.params
    rng = s.rng()
    if s.kind == "lattice":
        return Generated(PointSet(_grid(prm["step"], prm["extent"])))
    if s.kind == "perturbed_lattice":
        z = _grid(prm["step"], prm["extent"])
        z = z + prm["jitter"] * prm["step"] * (rng.uniform(-1, 1, len(z)) + 1j * rng.uniform(-1, 1, len(z)))
        return Generated(PointSet(z))
    if s.kind == "radial_disk":
        return Generated(PointSet(_rings(rng, prm["rings"], prm["m"]), Metric.DISK))
    if s.kind == "clustered":
        if w is None:
            raise PreconditionError("clustered scenarios need a weight")
        return Generated(*_clustered(rng, int(prm["n"]), int(prm["L"]), float(prm["B"]), w))
    return _union(rng, prm)


def _clustered(rng, n, L, B, w):
    if w.metric is not Metric.PLANE:
        raise PreconditionError("clustered scenarios live on the plane")
    C = clusters_C(w, n, B)
    clusters = []
    for l in range(1, L + 1):
        alpha = 0.3 * math.sqrt(l) * np.exp(2.4j * l)
        rad = math.exp(-C * float(eval_weight(w, alpha))) / l
        if rad / 2 < TINY:
            raise PreconditionError(f"cluster {l} radius {rad:.3g} underflows")
        phase = rng.random() * 2 * np.pi
        sats = alpha + (rad / 2) * np.exp(1j * (phase + 2 * np.pi * np.arange(n) / n))
        clusters.append(Cluster(complex(alpha), tuple(complex(x) for x in sats), 1.0 / l))
    fam = ClusterFamily(clusters, Metric.PLANE, C)
    fam.validate(w, n)
    pts, _ = fam.pointset()
    return pts, None, fam


def _union(rng, prm):
    n = int(prm["n"])
    if prm["base"] == "radial_disk":
        base = _rings(rng, prm["rings"], prm["m"])
        scale = (1 - np.abs(base)) * prm["offset"]
        metric = Metric.DISK
    else:
        base = _grid(prm["step"], prm["extent"])
        base = base + prm["jitter"] * prm["step"] * (rng.uniform(-1, 1, len(base))
                                                    + 1j * rng.uniform(-1, 1, len(base)))
        scale = np.full(len(base), prm["offset"] * prm["step"])
        metric = Metric.PLANE
    pts, parts = [], []
    for j in range(n):
        if j == 0:
            z = base
        else:
            # keep each part's point near its base point, away from the others
            ang = 2 * np.pi * (j + rng.uniform(-0.25, 0.25, len(base))) / n
            z = base + scale * rng.uniform(0.5, 1.0, len(base)) * np.exp(1j * ang)
        parts.append(list(range(len(pts), len(pts) + len(z))))
        pts.extend(z.tolist())
    return Generated(PointSet(np.asarray(pts, dtype=complex), metric), parts)


# -- suites -------------------------------------------------------------------------


def default_weight(metric: Metric = Metric.PLANE) -> Weight:
    if metric is Metric.DISK:
        return Weight.make("korenblum")
    return Weight.make("log_one_plus_sq")


class _Records:
    def __init__(self, suite):
        self.suite = suite
        self.items = []

    def add(self, trial, invariant, ok, value=None, instance=None):
        rec = {"suite": self.suite, "trial": trial, "invariant": invariant, "pass": bool(ok)}
        if instance is not None:
            rec["instance"] = instance
        if value is not None:
            rec["value"] = float(value)
        self.items.append(rec)


def _rng(seed, suite, trial):
    return np.random.Generator(np.random.PCG64([seed, SUITES.index(suite), trial]))


def _sub_seed(rng) -> int:
    return int(rng.integers(0, 2**31 - 1))


def _separated_covering(g: Generated, w: Weight, C_sep: float = 0.5):
    eps_sep = min(1.0, min(max_eps(g.points.subset(p), w, C_sep) for p in g.parts))
    eps, C = params_for_parts(0.999 * eps_sep, C_sep, w)
    return build_covering(g.points, g.parts, w, eps, C, check=False)


def _equiv_trial(rec, rng, t):
    w = default_weight()
    n = 2 + t % 2
    sc = Scenario("union_of_separated", {"n": n}, _sub_seed(rng))
    g = generate(sc, w)
    s = g.points
    prm = SeparationParams(0.5, 0.5)
    inst = f"union_of_separated(n={n}, seed={sc.seed})"
    cnt = count_condition(s, w, prm)
    rec.add(t, "count_condition<=n", cnt <= n, cnt, inst)
    try:
        dec = decompose(s, w, prm, n)
    except TraceLabError:
        rec.add(t, "decompose_sound", False, None, inst)
        return
    flat = sorted(i for p in dec.parts for i in p)
    rec.add(t, "decompose_partition", flat == list(range(len(s))), len(dec.parts), inst)
    sep = all(is_weakly_separated(s.subset(p), w, dec.params).ok for p in dec.parts)
    rec.add(t, "decompose_sound", sep and len(dec.parts) == n, None, inst)
    dual = count_condition(s, w, dec.params.derived(w))
    rec.add(t, "count_duality", dual <= n, dual, inst)

    L = 20
    cs = Scenario("clustered", {"n": n, "L": L, "B": 1.0}, _sub_seed(rng))
    fam = generate(cs, w).clusters
    v, index = counterexample_sequence(fam, n)
    curve = blowup_curve(v, index, w, n, 1.0)
    slope = math.exp(-1.0 * n * w.E0)
    worst = min(val / (l * slope) for l, val in curve)
    rec.add(t, "blowup_lower_bound", worst >= 1 - 1e-6, worst, f"clustered(n={n}, L={L})")
    vals = [val for _, val in curve]
    rec.add(t, "blowup_increasing", all(b > a for a, b in zip(vals, vals[1:])), None,
            f"clustered(n={n}, L={L})")
    ok = True
    pts = v.pointset
    for l, idx in enumerate(index, start=1):
        prm_l = SeparationParams(fam.clusters[l - 1].scale, fam.C)
        c = count_condition(pts.subset(idx), w, prm_l)
        ok &= c >= n + 1
    rec.add(t, "clusters_violate_count", ok, None, f"clustered(n={n}, L={L})")


def _cover_trial(rec, rng, t):
    w = default_weight()
    n = 2 + t % 2
    sc = Scenario("union_of_separated", {"n": n}, _sub_seed(rng))
    g = generate(sc, w)
    cov = _separated_covering(g, w)
    rep = verify_covering(cov, g.parts, w)
    inst = f"union_of_separated(n={n}, seed={sc.seed})"
    for c in rep.clauses:
        rec.add(t, f"clause_{c.name}", c.ok, None, inst)
    rec.add(t, "stage_bounds", all(s.ok for s in rep.stages), len(rep.stages), inst)
    exact = (cov.a == 2.0 ** (-3 * n) * math.exp(-cov.trace[-1].B_k)
             and cov.b == 2 / 7 and cov.B1 == cov.trace[-1].C_k and cov.B2 == cov.C)
    rec.add(t, "constants_exact", exact, None, inst)


def _trace_trial(rec, rng, t, metric=Metric.PLANE, suite_prefix=""):
    w = default_weight(metric)
    n = 2 + t % 2
    if metric is Metric.DISK:
        prm = {"n": n, "base": "radial_disk", "rings": 3 if n == 2 else 2, "m": 2}
    else:
        prm = {"n": n, "extent": 12.0 if n == 2 else 9.0}
    sc = Scenario("union_of_separated", prm, _sub_seed(rng))
    g = generate(sc, w)
    cov = _separated_covering(g, w)
    inst = f"union_of_separated({metric.value}, n={n}, seed={sc.seed}, size={len(g.points)})"
    omega = ValuedSet(g.points, random_values(rng, g.points, w))
    b = assemble(omega, cov, w, check=False)
    rec.add(t, suite_prefix + "residual<=1e-6", b.max_residual <= 1e-6, b.max_residual, inst)
    rec.add(t, suite_prefix + "leakage<=1e-7", b.max_leakage <= 1e-7, b.max_leakage, inst)
    j = t % n
    part = np.asarray(g.parts[j], dtype=int)
    vj = random_values(rng, g.points.subset(part), w)
    ext = extend_values(vj, cov, j)
    bx = assemble(ext, cov, w, check=False)
    got = bx.f(g.points.points[part])
    err = float(np.max(np.abs(got - vj) / (1 + np.abs(vj))))
    rec.add(t, suite_prefix + "necessity<=1e-6", err <= 1e-6, err, inst)


def _hyperbolic_trial(rec, rng, t):
    _trace_trial(rec, rng, t, Metric.DISK, "disk_")
    # Euclidean differences of a Blaschke-built function vs the contour oracle
    nodes = 0.9 * np.sqrt(rng.random(4)) * np.exp(2j * np.pi * rng.random(4))
    betas = 0.9 * np.sqrt(rng.random(3)) * np.exp(2j * np.pi * rng.random(3))
    f = Product([BlaschkeFactor(b) for b in betas])
    d = divided_difference(ValuedSet(PointSet(nodes, Metric.DISK), f(nodes)), range(4), Metric.PLANE)
    err = rel_err(d, contour_oracle(f, nodes))
    rec.add(t, "disk_contour_agreement", err <= 1e-8, err)
    # δ^1 with first node 0 reduces to Δ^1
    zeta = complex(nodes[0])
    v = ValuedSet(PointSet(np.array([0, zeta]), Metric.DISK), f(np.array([0, zeta])))
    red = abs(divided_difference(v, [0, 1], Metric.DISK) - divided_difference(v, [0, 1], Metric.PLANE))
    rec.add(t, "delta_reduction", red <= 1e-12, red)
    # area sum under the Korenblum weight
    w = default_weight(Metric.DISK)
    rs = Scenario("radial_disk", {"rings": 4 + t % 4, "m": 8}, _sub_seed(rng))
    pts = generate(rs, w).points.points
    C = 1.0 + (t % 3)
    area = float(np.sum((1 - np.abs(pts)) ** 2 * np.exp(-2 * C * eval_weight(w, pts))))
    rec.add(t, "area_sum<=4", area <= 4, area, f"radial_disk(rings={4 + t % 4}, m=8, C={C})")


_TRIALS = {"equiv": _equiv_trial, "cover": _cover_trial, "trace": _trace_trial,
           "hyperbolic": _hyperbolic_trial}


def run_suite(name: str, trials: int, seed: int = 0) -> dict:
    """Run one suite (or ``"all"``) and return the report as a dict."""
    names = SUITES if name == "all" else (name,)
    for nm in names:
        if nm not in SUITES:
            raise PreconditionError(f"unknown suite {nm!r}")
    records = []
    for nm in names:
        rec = _Records(nm)
        for t in range(int(trials)):
            rng = _rng(seed, nm, t)
            try:
                _TRIALS[nm](rec, rng, t)
            except TraceLabError as exc:
                rec.add(t, "no_error", False, None, f"{type(exc).__name__}: {exc}")
        records.extend(rec.items)
    failed = [r for r in records if not r["pass"]]
    return {
        "schema": SCHEMA,
        "suite": name,
        "trials": int(trials),
        "seed": int(seed),
        "prng": PRNG,
        "summary": {"records": len(records), "failed": len(failed), "ok": not failed},
        "records": records,
    }
