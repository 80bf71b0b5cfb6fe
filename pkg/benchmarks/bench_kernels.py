"""Compare the compiled and numpy kernel backends.

Usage: python benchmarks/bench_kernels.py [--size N] [--repeat R] [--json]
"""

import argparse
import json
import sys
import timeit

import numpy as np

from tracelab import kernels


def cases(rng, size):
    z = 4 * (rng.random(size) - 0.5) + 4j * (rng.random(size) - 0.5)
    v = rng.normal(size=size) + 1j * rng.normal(size=size)
    pw = np.log1p(np.abs(z) ** 2)
    small = max(8, size // 8)
    tuples = np.argsort(rng.random((20000, size)), axis=1)[:, :4].astype(np.int64)
    scale = np.exp(-0.5 * pw)
    return {
        "divdiff_tuples (20000 x 4)": lambda b: kernels.divdiff_tuples(z, v, tuples, backend=b),
        f"max_damped (n={small}, m=3)": lambda b: kernels.max_damped(z[:small], v[:small], pw[:small], 3, 1.0,
                                                                    backend=b, workers=1),
        f"min_pair_ratio (n={size})": lambda b: kernels.min_pair_ratio(z, scale, backend=b),
        f"max_disk_count (n={size})": lambda b: kernels.max_disk_count(z, 0.3 * scale, backend=b),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=400)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    try:
        kernels.get_backend("cython")
        backends = ["numpy", "cython"]
    except ImportError:
        print("compiled extension not built; timing numpy only", file=sys.stderr)
        backends = ["numpy"]
    rng = np.random.default_rng(0)
    rows = []
    for name, fn in cases(rng, args.size).items():
        row = {"kernel": name}
        for b in backends:
            fn(b)  # warm up
            row[b] = min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat))
        rows.append(row)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'kernel':34s} " + " ".join(f"{b:>10s}" for b in backends) + ("    speedup" if len(backends) > 1 else ""))
    for r in rows:
        line = f"{r['kernel']:34s} " + " ".join(f"{r[b] * 1e3:8.2f}ms" for b in backends)
        if len(backends) > 1:
            line += f"  {r['numpy'] / r['cython']:8.1f}x"
        print(line)


if __name__ == "__main__":
    main()
