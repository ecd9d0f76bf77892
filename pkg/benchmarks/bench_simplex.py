"""Compare the compiled and pure-Python simplex kernels.

The workload is the pattern LPs the oracle builds for corpus models: the
relaxed LP of each model plus a few seeded random trade patterns.  Both
backends must return identical results; the script reports wall time and
pivot counts per backend.

    python3 benchmarks/bench_simplex.py [--models 200] [--patterns 4] [--repeat 3]
"""

import argparse
import time

from arbcert import lp as lpmod
from arbcert.generator import XorShift64Star, corpus
from arbcert.lp import SolveStats, solve_lp
from arbcert.oracle import REGIONS, _pattern_lp


def workload(n_models, n_patterns):
    rng = XorShift64Star(2024)
    lps = []
    for model in corpus(n_models):
        size = len(model.tree)
        lps.append(_pattern_lp(model, [None] * size))
        for _ in range(n_patterns):
            lps.append(_pattern_lp(model, [REGIONS[rng.below(3)] for _ in range(size)]))
    return lps


def run(lps, backend, repeat):
    best, results, stats = float("inf"), None, None
    for _ in range(repeat):
        stats = SolveStats()
        start = time.perf_counter()
        results = [solve_lp(lp, backend=backend, stats=stats) for lp in lps]
        best = min(best, time.perf_counter() - start)
    return best, results, stats


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--models", type=int, default=200)
    ap.add_argument("--patterns", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    lps = workload(args.models, args.patterns)
    print(f"{len(lps)} LPs from {args.models} corpus models")
    backends = ["python"] + (["cython"] if lpmod._kernel_c is not None else [])
    if len(backends) == 1:
        print("compiled kernel not built; timing the Python kernel only")
    timings = {}
    reference = None
    for backend in backends:
        secs, results, stats = run(lps, backend, args.repeat)
        if reference is None:
            reference = results
        elif results != reference:
            raise SystemExit(f"{backend} results differ from the python kernel")
        timings[backend] = secs
        print(f"{backend:>7}: {secs:8.3f} s  {stats.pivots:7d} pivots  {stats.fallbacks} overflow fallbacks")
    if "cython" in timings:
        print(f"speedup: {timings['python'] / timings['cython']:.2f}x")


if __name__ == "__main__":
    main()
