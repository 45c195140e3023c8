"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--n 2000] [--repeat 3]

Both paths must return identical arrays; the script exits nonzero otherwise.
"""

import argparse
import sys
import time

import numpy as np

from quatform import _kernels
from quatform.family import family_form
from quatform.qform import jacobi_decompose


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000, help="enumeration cutoff")
    ap.add_argument("--p", type=int, default=101)
    ap.add_argument("--modulus", type=int, default=25, help="modulus for the residue histogram")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if not _kernels.HAVE_NUMBA:
        print("numba is not importable; nothing to compare")
        return 0

    Q = family_form(args.p).form
    dec = jacobi_decompose(Q)
    A = np.array(dec.reduced_gram, dtype=np.int64)
    a, m = dec.as_float()
    q = min(d for d in range(2, args.modulus + 1) if args.modulus % d == 0)

    cases = [
        (
            f"count_representations  p={args.p} N={args.n}",
            lambda: _kernels._count_representations_numba(A, a, m, args.n, _kernels.thread_count()),
            lambda: _kernels.count_representations_numpy(A, a, m, args.n),
        ),
        (
            f"residue_histograms     M={args.modulus}",
            lambda: _kernels._residue_histograms_numba(A, q, args.modulus, 4),
            lambda: _kernels.residue_histograms_numpy(A, q, args.modulus, 4),
        ),
    ]

    print(f"threads={_kernels.thread_count()}  repeat={args.repeat}")
    print(f"{'kernel':<40}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    status = 0
    for name, fast, slow in cases:
        t0 = time.perf_counter()
        fast()  # compile or load from cache
        warm = time.perf_counter() - t0
        t_fast, r_fast = best_of(fast, args.repeat)
        t_slow, r_slow = best_of(slow, 1)
        same = all(np.array_equal(x, y) for x, y in zip(np.atleast_2d(r_fast), np.atleast_2d(r_slow)))
        print(f"{name:<40}{t_fast:>12.4f}{t_slow:>12.4f}{t_slow / t_fast:>9.1f}x" + ("" if same else "  MISMATCH"))
        print(f"{'':<40}first call incl. compile: {warm:.2f} s")
        status |= not same
    return status


if __name__ == "__main__":
    sys.exit(main())
