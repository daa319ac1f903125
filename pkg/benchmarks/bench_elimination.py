#!/usr/bin/env python3
"""Benchmark the fraction-free elimination kernels (compiled vs pure Python).

Two workloads:
  * real differentials: the semi-infinite complex of the loop-nilpotent
    algebra with coefficients in its semiregular module, whose rank
    computations dominate the cohomology tables;
  * random sparse integer matrices of growing size, which isolate the
    kernel's loop overhead from matrix assembly.

Run:  python3 benchmarks/bench_elimination.py [--depth 5] [--size 220]
"""

import argparse
import random
import time

from semiflex._kernels import available_backends, elim_py

try:
    from semiflex._kernels import elim_c
except ImportError:
    elim_c = None

from semiflex.forms import SemiInfComplex, _active_weights
from semiflex.induction import universal_semijective
from semiflex.liealg import build_test_algebra


def collect_real_matrices(depth):
    alg = build_test_algebra("loop-nilpotent-a")
    module = universal_semijective(alg, depth).left_module()
    mats = []
    for w in sorted(_active_weights(alg, module, depth)):
        cx = SemiInfComplex(alg, module, w)
        ns = cx.ghost_range()
        for n in range(min(ns, default=0) - 1, max(ns, default=-1) + 1):
            m = cx.matrix(n)
            if m.nnz:
                mats.append(m._int_rows())
    return mats


def random_int_rows(rng, n, density, mag):
    return [
        [rng.randint(-mag, mag) if rng.random() < density else 0 for _ in range(n)]
        for _ in range(n)
    ]


def time_backend(kernel, matrices, repeats=3):
    best = None
    ranks = None
    for _ in range(repeats):
        copies = [[list(row) for row in m] for m in matrices]
        t0 = time.perf_counter()
        got = [kernel(m, len(m[0]))[0] for m in copies]
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
        if ranks is None:
            ranks = got
        elif ranks != got:
            raise AssertionError("backend results diverged between repeats")
    return best, ranks


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--depth", type=int, default=5)
    parser.add_argument("--size", type=int, default=200)
    args = parser.parse_args()

    print(f"available kernels: {available_backends()}")
    backends = [("python", elim_py.row_echelon_int)]
    if elim_c is not None:
        backends.append(("c", elim_c.row_echelon_int))

    real = collect_real_matrices(args.depth)
    print(f"\nreal workload: {len(real)} differential matrices (depth {args.depth})")
    results = {}
    for name, kernel in backends:
        dt, ranks = time_backend(kernel, real)
        results[name] = (dt, ranks)
        print(f"  {name:>7}: {dt * 1000:8.1f} ms")
    _check_agreement(results)

    rng = random.Random(17)
    for n in (40, 80, args.size):
        mats = [random_int_rows(rng, n, 0.3, 9) for _ in range(3)]
        print(f"\nrandom {n}x{n}, density 0.3:")
        results = {}
        for name, kernel in backends:
            dt, ranks = time_backend(kernel, mats)
            results[name] = (dt, ranks)
            print(f"  {name:>7}: {dt * 1000:8.1f} ms")
        _check_agreement(results)
    if elim_c is not None:
        print("\n(speedup = python time / c time per block above)")
    else:
        print("\ncompiled kernel not built; run `python3 setup.py build_ext --inplace`")


def _check_agreement(results):
    vals = [r for (_t, r) in results.values()]
    if len(vals) == 2 and vals[0] != vals[1]:
        raise AssertionError("kernels disagree on ranks")
    if len(results) == 2:
        tp = results["python"][0]
        tc = results["c"][0]
        print(f"  speedup: {tp / tc:5.2f}x")


if __name__ == "__main__":
    main()
