"""Compare the compiled and numpy kernel backends on oracle workloads.

Run: python3 benchmarks/bench_kernels.py [--repeat N] [--csv out.csv]
"""

import argparse
import csv
import time
from fractions import Fraction

from pweikonal import kernels
from pweikonal.geometry import diamond, unit_square
from pweikonal.oracle import GridSpec, grid_inner_domain, min_F_grid, relaxation_lower_bound

F = Fraction

CASES = [
    ("diamond r=2, pitch 1/2", lambda: GridSpec(diamond(2), F(1, 2)), "dp"),
    ("diamond r=1, pitch 1/2", lambda: GridSpec(diamond(1), F(1, 2)), "dp"),
    ("unit square inner, pitch 1/4", lambda: GridSpec(grid_inner_domain(unit_square(), F(1, 4)), F(1, 4)), "dp"),
    ("unit square inner, pitch 1/8", lambda: GridSpec(grid_inner_domain(unit_square(), F(1, 8)), F(1, 8)), "dp"),
    ("unit square inner, pitch 1/8 (relaxation)",
     lambda: GridSpec(grid_inner_domain(unit_square(), F(1, 8)), F(1, 8)), "relax"),
]


def run(case, backend):
    _, make, kind = case
    G = make()
    t = time.perf_counter()
    if kind == "dp":
        res = min_F_grid(G, backend=backend)
        out = (str(res.min_value), res.count)
    else:
        res = relaxation_lower_bound(G, backend=backend)
        out = (str(res.lower), res.nodes)
    return time.perf_counter() - t, out


def kernel_only(backend, n=200000, A=12, seed=0):
    """Time one union-jack expansion step on a synthetic frontier."""
    import numpy as np

    uj, _ = kernels.get_backend(backend)
    rng = np.random.default_rng(seed)
    W = 2 * A + 3
    S = np.zeros((n, W), dtype=np.int16)
    base = rng.integers(-3, 4, size=(n, 1)) * 2
    S[:, : A + 2] = base + 2 * rng.integers(-1, 2, size=(n, A + 2))
    S[:, A + 2:] = rng.integers(-1, 2, size=(n, A + 1))
    t = time.perf_counter()
    out = uj(S, A // 2, True, False, 40, 41, A)
    return time.perf_counter() - t, len(out[0])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--csv")
    a = ap.parse_args()
    backends = ["python"]
    try:
        kernels.get_backend("compiled")
        backends.append("compiled")
    except ImportError:
        print("compiled extension not built; timing the numpy fallback only")
    rows = []
    print(f"{'case':45s} {'backend':9s} {'best s':>9s}  result")
    for case in CASES:
        results = {}
        for b in backends:
            best = None
            for _ in range(a.repeat):
                dt, out = run(case, b)
                best = dt if best is None else min(best, dt)
            results[b] = out
            rows.append((case[0], b, best, out[0], out[1]))
            print(f"{case[0]:45s} {b:9s} {best:9.4f}  {out[0]} ({out[1]})")
        if len(set(results.values())) != 1:
            raise SystemExit(f"backends disagree on {case[0]}: {results}")
    for b in backends:
        dt, m = kernel_only(b)
        rows.append(("kernel only: uj_expand on 200000 states", b, dt, "", m))
        print(f"{'kernel only: uj_expand on 200000 states':45s} {b:9s} {dt:9.4f}  {m} transitions")
    if "compiled" in backends:
        for name in dict.fromkeys(r[0] for r in rows):
            t = {r[1]: r[2] for r in rows if r[0] == name}
            print(f"speedup {name}: {t['python'] / t['compiled']:.2f}x")
    if a.csv:
        with open(a.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["case", "backend", "seconds", "value", "count_or_nodes"])
            w.writerows(rows)


if __name__ == "__main__":
    main()
