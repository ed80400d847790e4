"""Compare the compiled and numpy kernel backends on the spectrum pipeline.

    python3 benchmarks/bench_kernels.py [--cases 5,11 11,4 9,7] [--repeat 3]
"""

import argparse
import statistics
import time

from kleintorelli import kernels
from kleintorelli.torelli import enumerate_spectrum, extremality_report, stabilizer

DEFAULT_CASES = ["3,11", "11,4", "5,11", "9,7"]


def time_case(n, d, backend, repeat):
    budget = (d - 1) ** (n + 2) + 1
    stages = {"enumerate": [], "extremality": [], "stabilizer": []}
    for _ in range(repeat):
        t0 = time.perf_counter()
        sp = enumerate_spectrum(n, d, budget=budget, backend=backend)
        t1 = time.perf_counter()
        extremality_report(sp)
        t2 = time.perf_counter()
        stabilizer(sp, backend=backend)
        t3 = time.perf_counter()
        stages["enumerate"].append(t1 - t0)
        stages["extremality"].append(t2 - t1)
        stages["stabilizer"].append(t3 - t2)
    return {k: statistics.median(v) for k, v in stages.items()}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", nargs="+", default=DEFAULT_CASES, metavar="N,D")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = sorted(kernels.BACKENDS)
    if "cython" not in backends:
        print("compiled backend not built; only timing the fallback")
    print(f"{'case':>8} {'tuples':>12} {'backend':>8} {'enumerate':>10} {'extremal':>10} {'stabilizer':>10} {'total':>8}")
    for case in args.cases:
        n, d = (int(x) for x in case.split(","))
        totals = {}
        for backend in backends:
            t = time_case(n, d, backend, args.repeat)
            totals[backend] = sum(t.values())
            print(
                f"{f'({n},{d})':>8} {(d - 1) ** (n + 2):>12} {backend:>8} "
                f"{t['enumerate']:>10.4f} {t['extremality']:>10.4f} {t['stabilizer']:>10.4f} {totals[backend]:>8.3f}"
            )
        if len(totals) == 2:
            print(f"{'':>8} speedup cython over python: {totals['python'] / totals['cython']:.1f}x")


if __name__ == "__main__":
    main()
