"""Compiled vs pure-Python enumeration kernels on random instances.

Usage: python benchmarks/bench_kernels.py [--repeat 3] [--sizes 3x8,3x10,4x8]
"""
from __future__ import annotations

import argparse
import random
import time

from fairmarket import kernels


def _instance(n: int, m: int, seed: int) -> list[list[int]]:
    rng = random.Random(seed)
    return [[rng.randint(0, 10) for _ in range(m)] for _ in range(n)]


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sizes", default="3x8,3x10,4x8,4x9")
    args = ap.parse_args()
    if not kernels.HAVE_COMPILED:
        print("compiled kernels unavailable; only the Python backend will run")
    print(f"{'size':>6} {'kernel':>18} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for spec in args.sizes.split(","):
        n, m = map(int, spec.split("x"))
        values = _instance(n, m, seed=n * 100 + m)
        # A Pareto-optimal base forces the dominance search to exhaust the tree.
        assign, _ = kernels.best_assignment(values, kernels.MNW)
        base = [sum(values[i][j] for j, a in enumerate(assign) if a == i) for i in range(n)]
        cases = {
            "best_assignment": lambda b: kernels.best_assignment(values, kernels.MNW, backend=b),
            "leximin": lambda b: kernels.best_assignment(values, kernels.LEXIMIN, backend=b),
            "first_dominating": lambda b: kernels.first_dominating(values, base, backend=b),
        }
        for name, fn in cases.items():
            py = _time(lambda: fn("python"), args.repeat)
            if kernels.HAVE_COMPILED:
                assert fn("python") == fn("cython"), f"backends disagree on {name} {spec}"
                cy = _time(lambda: fn("cython"), args.repeat)
                print(f"{spec:>6} {name:>18} {py:>10.4f} {cy:>10.4f} {py / cy:>8.1f}")
            else:
                print(f"{spec:>6} {name:>18} {py:>10.4f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
