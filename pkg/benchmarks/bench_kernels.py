"""Numba vs numpy backend timings for the pair-defect kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--blocks 2,3 3,3 4,4,2]

Numba times exclude compilation (one warm-up call per kernel).
"""
import argparse
import timeit

import numpy as np

from liederiv import _kernels
from liederiv.algebra import make_algebra
from liederiv.linmap import sample_lie_derivation


def bench(fn, repeat):
    fn()  # warm-up (jit compilation, einsum path caching)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--blocks", nargs="+", default=["2,3", "2,3,1", "3,3", "4,4,2", "5,4"])
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'algebra':<12}{'N':>4}  {'kernel':<12}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}")
    for spec in args.blocks:
        A = make_algebra([int(t) for t in spec.split(",")])
        M = sample_lie_derivation(A, 0).operator.matrix
        prod = A.product_table
        kernels = {
            "lie": lambda: _kernels.pair_defects(M, prod, True),
            "leibniz": lambda: _kernels.pair_defects(M, prod, False),
            "commutator": lambda: _kernels.commutator_defects(M, prod),
        }
        if A.coord_dim <= 16:
            kernels["constraints"] = lambda: _kernels.lie_constraints(prod)
        for name, fn in kernels.items():
            t = {}
            for backend in ("numpy", "numba"):
                with _kernels.use_backend(backend):
                    t[backend] = bench(fn, args.repeat)
            with _kernels.use_backend("numpy"):
                ref = fn()
            with _kernels.use_backend("numba"):
                assert np.allclose(ref, fn(), atol=1e-10), f"backends disagree on {name}"
            print(f"[{spec}]".ljust(12) + f"{A.coord_dim:>4}  {name:<12}"
                  f"{1e3 * t['numpy']:>12.3f}{1e3 * t['numba']:>12.3f}{t['numpy'] / t['numba']:>8.1f}x")


if __name__ == "__main__":
    main()
