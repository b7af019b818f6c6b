"""Compare the compiled and pure-Python polynomial kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Times ``mul_terms`` on tau-like polynomials (3 components, times up to order 3,
degree cap 3 and 6) and the whole default CLI scenario under each backend.
"""
import argparse
import os
import random
import subprocess
import sys
import time

from mkptau.algebra import _pykernels
from mkptau.algebra.timepoly import Q, TimeSpace

try:
    from mkptau.algebra import _ckernels
except ImportError:
    _ckernels = None


def random_terms(space, n_terms, rng):
    terms = {}
    for _ in range(n_terms):
        exps = [0] * space.nvars
        for _ in range(rng.randint(0, space.degree_cap)):
            exps[rng.randrange(space.nvars)] += 1
        terms[space.encode(exps)] = Q(rng.randint(-5, 5), rng.randint(1, 4))
    return {k: v for k, v in terms.items() if v}


def bench_mul(mod, space, a, b, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        mod.mul_terms(a, b, space.deg_shift, space.copies, space.degree_cap)
        best = min(best, time.perf_counter() - t)
    return best


def bench_cli(pure, repeat):
    env = dict(os.environ)
    if pure:
        env["MKPTAU_PURE_PYTHON"] = "1"
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        subprocess.run([sys.executable, "-m", "mkptau.cli", "--seed", "1"], env=env, check=True,
                       stdout=subprocess.DEVNULL)
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = random.Random(0)
    print(f"{'case':34s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for cap, n_terms in ((3, 60), (6, 200), (6, 600)):
        space = TimeSpace(3, 3, 1, cap)
        a, b = random_terms(space, n_terms, rng), random_terms(space, n_terms, rng)
        py = bench_mul(_pykernels, space, a, b, args.repeat)
        if _ckernels is None:
            print(f"mul cap={cap} terms={n_terms:<4d}            {py * 1e3:9.2f}ms {'n/a':>10s}")
            continue
        assert _ckernels.mul_terms(a, b, space.deg_shift, 1, cap) == _pykernels.mul_terms(a, b, space.deg_shift, 1, cap)
        cy = bench_mul(_ckernels, space, a, b, args.repeat)
        print(f"mul cap={cap} terms={n_terms:<4d}{'':16s} {py * 1e3:8.2f}ms {cy * 1e3:8.2f}ms {py / cy:7.2f}x")
    py = bench_cli(True, max(1, args.repeat // 2))
    cy = bench_cli(False, max(1, args.repeat // 2)) if _ckernels is not None else float("nan")
    print(f"{'cli default scenario (seed 1)':34s} {py:9.2f}s {cy:9.2f}s {py / cy:7.2f}x")


if __name__ == "__main__":
    main()
