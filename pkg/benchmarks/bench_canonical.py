"""Benchmark the canonical-labeling kernels: compiled extension vs the pure
Python fallback.

The canonical form is the hot kernel of every enumeration loop (millions of
calls while reproducing the n=14 component table), so the speedup here is
what makes the larger levels practical.

Usage: python benchmarks/bench_canonical.py [--max-n N]
"""

import argparse
import statistics
import time

from pachner import _canon_py
from pachner.canonical import BACKEND
from pachner.explorer import enumerate_stacked
from pachner.sphere import parse_triangles

try:
    from pachner import _canon_fast
except ImportError:
    _canon_fast = None


def bench(kernel, corpus, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        for n, tris in corpus:
            kernel.canonical_triangles(n, tris)
        times.append((time.perf_counter() - start) / len(corpus))
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--max-n", type=int, default=12)
    parser.add_argument("--per-level", type=int, default=40)
    args = parser.parse_args()

    print(f"active backend: {BACKEND}")
    if _canon_fast is None:
        print("compiled kernel not built; benchmarking the fallback only")
    header = f"{'n':>4} {'spheres':>8} {'python':>12} {'cython':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in range(6, args.max_n + 1):
        sigs = enumerate_stacked(n)[:args.per_level]
        corpus = []
        for sig in sigs:
            k, tris = parse_triangles(sig)
            corpus.append((k, tris))
        py = bench(_canon_py, corpus, repeat=3)
        if _canon_fast is not None:
            fast = bench(_canon_fast, corpus, repeat=5)
            print(f"{n:>4} {len(corpus):>8} {py * 1e6:>10.1f}us "
                  f"{fast * 1e6:>10.1f}us {py / fast:>7.1f}x")
        else:
            print(f"{n:>4} {len(corpus):>8} {py * 1e6:>10.1f}us "
                  f"{'-':>12} {'-':>8}")


if __name__ == "__main__":
    main()
