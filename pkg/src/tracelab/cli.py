"""``tracelab`` command line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
With ``--json`` the machine-readable result goes to stdout; human-readable
text always goes to stderr.
"""

from __future__ import annotations

import argparse
import itertools
import sys

import numpy as np

from . import __version__, io
from .core import Metric, PointSet
from .covering import (Covering, build_covering, params_for_parts, verify_covering)
from .divdiff import ValuedSet, divided_differences, seminorm, seminorm_curve
from .errors import TraceLabError, VerificationError
from .interpolate import assemble, extend_values
from .lab import KINDS, SUITES, Scenario, generate, run_suite
from .separation import (ClusterFamily, SeparationParams, blowup_curve, count_condition,
                         counterexample_sequence, decompose, is_weakly_separated, max_eps)
from .svg import render_covering, render_separation


class _Fail(Exception):
    """Raised by a command whose result is a verification failure."""


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(args, payload) -> None:
    if args.json:
        sys.stdout.write(io.dumps(payload))


def _weight(args, metric: Metric):
    if getattr(args, "weight", None):
        w = io.load_weight(args.weight)
    else:
        w = io.load_weight("korenblum" if metric is Metric.DISK else "log_one_plus_sq")
    if w.metric is not metric:
        raise io.SchemaError(f"weight {w.kind} lives on the {w.metric.value}, points on the {metric.value}")
    return w


def _set_from(data, where):
    if "set" not in data:
        raise io.SchemaError(f"{where} has no embedded point set; pass --input", "/set")
    return io.setfile_from_json(data["set"])


def _parse_range(text):
    try:
        a, b, k = text.split(":")
        return np.linspace(float(a), float(b), int(k)).tolist()
    except ValueError:
        raise io.SchemaError(f"--curve expects b0:b1:steps, got {text!r}") from None


# -- commands ----------------------------------------------------------------------


def cmd_divdiff(args):
    sf = io.load_set(args.input)
    v = sf.valued
    metric = Metric.DISK if args.hyperbolic else Metric.PLANE
    if args.hyperbolic and v.metric is not Metric.DISK:
        raise io.SchemaError("--hyperbolic needs a disk-metric set", "/metric")
    size = args.order + 1
    if args.tuple:
        tuples = [[int(x) for x in t.split(",")] for t in args.tuple]
    else:
        gen = itertools.permutations if metric is Metric.DISK else itertools.combinations
        tuples = [list(t) for t in itertools.islice(gen(range(len(v)), size), args.limit)]
    for t in tuples:
        if len(t) != size:
            raise io.SchemaError(f"tuple {t} has {len(t)} entries, order {args.order} needs {size}")
    vals = divided_differences(v, tuples, metric) if tuples else np.empty(0, complex)
    _emit(args, {"order": args.order, "metric": metric.value, "tuples": tuples,
                 "values": [complex(x) for x in vals]})
    _say(f"{len(tuples)} divided differences of order {args.order}; "
         f"max modulus {np.abs(vals).max() if len(vals) else 0:.6g}")


def cmd_seminorm(args):
    v = io.load_set(args.input).valued
    w = _weight(args, v.metric)
    mode = ("sampled", args.sampled) if args.sampled else "exact"
    if args.curve:
        curve = seminorm_curve(v, w, args.order, _parse_range(args.curve), mode=mode, seed=args.seed)
        _emit(args, curve.to_json())
        for b, s in curve.samples:
            _say(f"B={b:.6g}  S_B={s:.6g}")
        return
    r = seminorm(v, w, args.order, args.B, mode=mode, seed=args.seed, return_witness=True)
    _emit(args, {"order": args.order, "B": args.B, "value": r.value, "tuple": list(r.tuple),
                 "evaluated": r.evaluated, "mode": "exact" if mode == "exact" else "sampled"})
    _say(f"S_B={r.value:.6g} at tuple {list(r.tuple)} ({r.evaluated} tuples)")


def cmd_separation(args):
    s = io.load_set(args.input).points
    w = _weight(args, s.metric)
    if args.find_eps:
        e = max_eps(s, w, args.C)
        _emit(args, {"C": args.C, "max_eps": e})
        _say(f"max eps at C={args.C}: {e:.17g}")
        return
    if args.eps is None:
        raise io.SchemaError("--eps is required unless --find-eps is given")
    prm = SeparationParams(args.eps, args.C)
    rep = is_weakly_separated(s, w, prm)
    payload = rep.to_json()
    payload.update({"eps": args.eps, "C": args.C, "count": count_condition(s, w, prm)})
    _emit(args, payload)
    if args.svg:
        render_separation(s, prm.radii(s, w), args.svg, {"eps": args.eps, "C": args.C})
    _say(("weakly separated" if rep.ok else f"not separated, closest pair {rep.witness}")
         + f" (eps={args.eps}, C={args.C})")
    if not rep.ok:
        raise _Fail()


def cmd_decompose(args):
    sf = io.load_set(args.input)
    s = sf.points
    w = _weight(args, s.metric)
    dec = decompose(s, w, SeparationParams(args.eps, args.C), args.n)
    payload = {"schema": io.SCHEMA, **dec.to_json(), "set": io.SetFile(s, sf.values).to_json()}
    if args.out:
        io.write_json(args.out, payload)
    _emit(args, payload)
    _say(f"{args.n} parts of sizes {[len(p) for p in dec.parts]}, "
         f"eps'={dec.params.eps:.6g}, C'={dec.params.C:.6g}")


def cmd_counterexample(args):
    data = io.load_checked(args.clusters, "clusters")
    fam = ClusterFamily.from_json(data)
    w = _weight(args, fam.metric)
    v, index = counterexample_sequence(fam, args.n)
    curve = blowup_curve(v, index, w, args.n, args.B)
    floor = np.exp(-args.B * args.n * w.E0)
    ok = all(val >= l * floor * (1 - 1e-6) for l, val in curve)
    _emit(args, {"n": args.n, "B": args.B, "curve": [[l, val] for l, val in curve],
                 "lower_bound_slope": floor, "ok": ok})
    for l, val in curve:
        _say(f"l={l:3d}  value={val:.6g}  bound={l * floor:.6g}")
    if not ok:
        raise _Fail()


def _load_parts(args):
    data = io.load_checked(args.parts, "parts")
    sf = io.load_set(args.input) if getattr(args, "input", None) else _set_from(data, args.parts)
    return data, sf


def cmd_cover(args):
    data, sf = _load_parts(args)
    s = sf.points
    w = _weight(args, s.metric)
    eps, C = params_for_parts(data["eps_prime"], data["C_prime"], w)
    eps = args.eps if args.eps is not None else eps
    C = args.C if args.C is not None else C
    cov = build_covering(s, data["parts"], w, eps, C, check=False)
    rep = verify_covering(cov, cov.parts, w)
    payload = {"schema": io.SCHEMA, **cov.to_json(), "verification": rep.to_json(),
               "set": io.SetFile(s, sf.values).to_json()}
    if args.out:
        io.write_json(args.out, payload)
    if args.svg:
        render_covering(cov, args.svg)
    _emit(args, payload)
    _say(f"{len(cov.centers)} disks; clauses " +
         ", ".join(f"({c.name}) {'pass' if c.ok else 'FAIL'}" for c in rep.clauses))
    if not rep.ok:
        raise _Fail()


def _load_cover(path, sf=None):
    data = io.load_checked(path, "cover")
    if sf is None:
        sf = _set_from(data, path)
    cov = Covering.from_json(data, sf.points)
    if cov.assignment is None:
        from .covering import _assign

        cov.assignment = _assign(cov)
    return cov, sf


def cmd_extend(args):
    sf = io.load_set(args.input)
    cov, _ = _load_cover(args.cover, sf)
    if not 0 <= args.part < cov.n:
        raise io.SchemaError(f"part {args.part} out of range 0..{cov.n - 1}")
    if sf.values is None:
        raise io.SchemaError("input has no values", "/values")
    part = np.asarray(cov.parts[args.part], dtype=int)
    ext = extend_values(sf.values[part], cov, args.part)
    out = io.SetFile(ext.pointset, ext.values, sf.labels)
    if args.out:
        io.save_set(args.out, out)
    _emit(args, out.to_json())
    _say(f"extended {len(part)} values of part {args.part} to {len(ext)} points")


def cmd_interpolate(args):
    sf = io.load_set(args.input)
    v = sf.valued
    if args.hyperbolic and v.metric is not Metric.DISK:
        raise io.SchemaError("--hyperbolic needs a disk-metric set", "/metric")
    w = _weight(args, v.metric)
    if args.cover:
        cov, _ = _load_cover(args.cover, sf)
    else:
        if not args.parts:
            raise io.SchemaError("pass --cover or --parts")
        data = io.load_checked(args.parts, "parts")
        eps, C = params_for_parts(data["eps_prime"], data["C_prime"], w)
        cov = build_covering(v.pointset, data["parts"], w, eps, C)
    D = args.D if args.D == "auto" else float(args.D)
    b = assemble(v, cov, w, D=D, tol=args.tol, check=False)
    payload = {"schema": io.SCHEMA, **b.to_json(), "tol": args.tol, "ok": b.max_residual <= args.tol}
    if args.out:
        io.write_json(args.out, payload)
    _emit(args, payload)
    _say(f"{len(b.terms)} centers, D={b.D:.6g}, max residual {b.max_residual:.3e}, "
         f"max leakage {b.max_leakage:.3e}")
    if b.max_residual > args.tol:
        raise _Fail()


def cmd_verify(args):
    if args.cover:
        sf = io.load_set(args.input) if args.input else None
        cov, sf = _load_cover(args.cover, sf)
        w = _weight(args, sf.points.metric)
        rep = verify_covering(cov, cov.parts, w)
        payload = rep.to_json()
        ok = rep.ok
    else:
        payload = run_suite(args.suite, args.trials, args.seed)
        ok = payload["summary"]["ok"]
    if args.report:
        io.write_json(args.report, payload)
    _emit(args, payload)
    _say("all checks pass" if ok else "verification FAILED")
    if not ok:
        raise _Fail()


def _params(items):
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise io.SchemaError(f"--param expects key=value, got {item!r}")
        try:
            out[key] = int(val)
        except ValueError:
            try:
                out[key] = float(val)
            except ValueError:
                out[key] = val
    return out


def cmd_lab(args):
    if args.lab_cmd == "generate":
        sc = Scenario(args.kind, _params(args.param), args.seed)
        metric = Metric.DISK if (args.kind == "radial_disk" or sc.params.get("base") == "radial_disk") \
            else Metric.PLANE
        w = _weight(args, metric)
        g = generate(sc, w)
        labels = None
        if g.parts is not None:
            labels = [0] * len(g.points)
            for j, part in enumerate(g.parts):
                for i in part:
                    labels[i] = j
        out = io.SetFile(g.points, None, labels).to_json()
        out["scenario"] = {"kind": sc.kind, "params": sc.params, "seed": sc.seed, "prng": "numpy.random.PCG64"}
        if g.clusters is not None:
            out["clusters"] = g.clusters.to_json()
            if args.clusters_out:
                io.write_json(args.clusters_out, {"schema": io.SCHEMA, **g.clusters.to_json()})
        if args.out:
            io.write_json(args.out, out)
        _emit(args, out)
        _say(f"{sc.kind}: {len(g.points)} points")
        return
    report = run_suite(args.suite, args.trials, args.seed)
    if args.report:
        io.write_json(args.report, report)
    _emit(args, report)
    s = report["summary"]
    _say(f"{s['records']} records, {s['failed']} failed")
    if not s["ok"]:
        raise _Fail()


def cmd_render(args):
    if args.cover:
        cov, _ = _load_cover(args.cover, io.load_set(args.input) if args.input else None)
        render_covering(cov, args.out)
    else:
        if not args.input or args.eps is None:
            raise io.SchemaError("render needs --cover, or --input with --eps and --C")
        s = io.load_set(args.input).points
        w = _weight(args, s.metric)
        prm = SeparationParams(args.eps, args.C)
        render_separation(s, prm.radii(s, w), args.out, {"eps": args.eps, "C": args.C})
    _say(f"wrote {args.out}")


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output on stdout")
    common.add_argument("--weight", help="weight kind (e.g. log_one_plus_sq, power_abs:2) or JSON file")

    ap = argparse.ArgumentParser(prog="tracelab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"tracelab {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("divdiff", parents=[common], help="divided differences of a valued set")
    p.add_argument("--input", required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--hyperbolic", action="store_true")
    p.add_argument("--tuple", action="append", help="comma-separated indices; repeatable")
    p.add_argument("--limit", type=int, default=1000, help="max tuples when enumerating")
    p.set_defaults(func=cmd_divdiff)

    p = sub.add_parser("seminorm", parents=[common], help="damped sup of order n-1 differences")
    p.add_argument("--input", required=True)
    p.add_argument("--order", type=int, required=True, help="tuple size n")
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--curve", help="b0:b1:steps")
    p.add_argument("--sampled", type=int, help="random tuples instead of exhaustive scan")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_seminorm)

    p = sub.add_parser("separation", parents=[common], help="weak separation test")
    p.add_argument("--input", required=True)
    p.add_argument("--eps", type=float)
    p.add_argument("--C", type=float, default=0.0)
    p.add_argument("--find-eps", action="store_true")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_separation)

    p = sub.add_parser("decompose", parents=[common], help="split into weakly separated parts")
    p.add_argument("--input", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("counterexample", parents=[common], help="blow-up curve of a cluster family")
    p.add_argument("--clusters", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--B", type=float, default=1.0)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("cover", parents=[common], help="build and verify the disk covering")
    p.add_argument("--parts", required=True)
    p.add_argument("--input", help="point set (default: the one embedded in the parts file)")
    p.add_argument("--eps", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("extend", parents=[common], help="extend one part's values to all points")
    p.add_argument("--input", required=True, help="valued set; values on the part are used")
    p.add_argument("--cover", required=True)
    p.add_argument("--part", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("interpolate", parents=[common], help="assemble the interpolant")
    p.add_argument("--input", required=True)
    p.add_argument("--parts")
    p.add_argument("--cover")
    p.add_argument("--D", default="0", help="damping exponent or 'auto'")
    p.add_argument("--hyperbolic", action="store_true")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out")
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite or check a covering")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cover")
    p.add_argument("--input")
    p.add_argument("--report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lab", help="scenario generation and experiment runs")
    lsub = p.add_subparsers(dest="lab_cmd", required=True)
    g = lsub.add_parser("generate", parents=[common])
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--param", action="append", help="key=value; repeatable")
    g.add_argument("--out")
    g.add_argument("--clusters-out")
    g.set_defaults(func=cmd_lab)
    r = lsub.add_parser("run", parents=[common])
    r.add_argument("--suite", choices=SUITES + ("all",), required=True)
    r.add_argument("--trials", type=int, default=10)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--report")
    r.set_defaults(func=cmd_lab)

    p = sub.add_parser("render", parents=[common], help="SVG of a covering or separation disks")
    p.add_argument("--cover")
    p.add_argument("--input")
    p.add_argument("--eps", type=float)
    p.add_argument("--C", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.func(args)
    except _Fail:
        return 1
    except VerificationError as exc:
        _say(f"verification failed: {exc}")
        return 1
    except TraceLabError as exc:
        _say(f"error: {exc}")
        return 2
    except OSError as exc:
        _say(f"error: {exc}")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
