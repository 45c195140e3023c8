"""Hot loops: lattice-point enumeration and residue counting.

Each kernel has a numba implementation and a pure-numpy twin.  The numba path
is used when numba imports and ``QUATFORM_NO_NUMBA`` is unset (or "0").
Both paths return identical integer arrays.
"""

from __future__ import annotations

import math
import os
import warnings

import numpy as np

EPS = 1e-9

# numba probes for TBB at import and warns when the installed one is too old
warnings.filterwarnings("ignore", message="The TBB threading layer requires TBB")

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False


def numba_enabled() -> bool:
    return HAVE_NUMBA and os.environ.get("QUATFORM_NO_NUMBA", "").strip().lower() in ("", "0", "false", "no")


def thread_count() -> int:
    env = os.environ.get("QUATFORM_THREADS", "").strip()
    if env:
        return max(1, int(env))
    if HAVE_NUMBA:
        return numba.get_num_threads()
    return 1


def set_threads(n: int | None) -> None:
    if n is None:
        return
    os.environ["QUATFORM_THREADS"] = str(int(n))
    if HAVE_NUMBA:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


# -- exact value of Q in int64 -----------------------------------------------------

def _qvalues_numpy(A: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Q(x) for each row of X (k x 4), exactly in int64."""
    twice = np.einsum("ki,ij,kj->k", X, A, X)
    return twice // 2


# -- lattice enumeration -------------------------------------------------------------

def _interval(c: float, rem: float, a: float) -> tuple[int, int]:
    r = math.sqrt(max(rem, 0.0) / a) + EPS
    return math.ceil(c - r - EPS), math.floor(c + r + EPS)


def count_representations_numpy(A, a, m, N):
    A = np.asarray(A, dtype=np.int64)
    counts = np.zeros(N + 1, dtype=np.int64)
    budget = N * (1 + EPS) + EPS
    lo4, hi4 = _interval(0.0, budget, a[3])
    for x4 in range(lo4, hi4 + 1):
        rem4 = budget - a[3] * x4 * x4
        if rem4 < 0:
            continue
        c3 = -m[2, 3] * x4
        lo3, hi3 = _interval(c3, rem4, a[2])
        chunks = []
        for x3 in range(lo3, hi3 + 1):
            rem3 = rem4 - a[2] * (x3 - c3) ** 2
            if rem3 < 0:
                continue
            c2 = -(m[1, 2] * x3 + m[1, 3] * x4)
            lo2, hi2 = _interval(c2, rem3, a[1])
            if hi2 < lo2:
                continue
            x2 = np.arange(lo2, hi2 + 1, dtype=np.int64)
            rem2 = rem3 - a[1] * (x2 - c2) ** 2
            c1 = -(m[0, 1] * x2 + m[0, 2] * x3 + m[0, 3] * x4)
            r1 = np.sqrt(np.maximum(rem2, 0.0) / a[0]) + EPS
            lo1 = np.ceil(c1 - r1 - EPS).astype(np.int64)
            hi1 = np.floor(c1 + r1 + EPS).astype(np.int64)
            lens = np.where(rem2 >= 0, np.maximum(hi1 - lo1 + 1, 0), 0)
            total = int(lens.sum())
            if total == 0:
                continue
            starts = np.repeat(np.cumsum(lens) - lens, lens)
            x1 = np.repeat(lo1, lens) + (np.arange(total, dtype=np.int64) - starts)
            X = np.empty((total, 4), dtype=np.int64)
            X[:, 0] = x1
            X[:, 1] = np.repeat(x2, lens)
            X[:, 2] = x3
            X[:, 3] = x4
            chunks.append(_qvalues_numpy(A, X))
        if chunks:
            vals = np.concatenate(chunks)
            vals = vals[(vals >= 0) & (vals <= N)]
            counts += np.bincount(vals, minlength=N + 1)
    return counts


if HAVE_NUMBA:

    @njit(cache=True)
    def _ceil_i(x):
        return int(math.ceil(x))

    @njit(cache=True)
    def _floor_i(x):
        return int(math.floor(x))

    @njit(cache=True)
    def _enumerate_x4(A, a, m, N, x4, out):
        budget = N * (1 + EPS) + EPS
        rem4 = budget - a[3] * x4 * x4
        if rem4 < 0:
            return
        h0 = A[0, 0] // 2
        h1 = A[1, 1] // 2
        h2 = A[2, 2] // 2
        h3 = A[3, 3] // 2
        c3 = -m[2, 3] * x4
        r3 = math.sqrt(rem4 / a[2]) + EPS
        for x3 in range(_ceil_i(c3 - r3 - EPS), _floor_i(c3 + r3 + EPS) + 1):
            rem3 = rem4 - a[2] * (x3 - c3) ** 2
            if rem3 < 0:
                continue
            c2 = -(m[1, 2] * x3 + m[1, 3] * x4)
            r2 = math.sqrt(rem3 / a[1]) + EPS
            # partial exact value of the x3, x4 part
            base34 = h2 * x3 * x3 + h3 * x4 * x4 + A[2, 3] * x3 * x4
            for x2 in range(_ceil_i(c2 - r2 - EPS), _floor_i(c2 + r2 + EPS) + 1):
                rem2 = rem3 - a[1] * (x2 - c2) ** 2
                if rem2 < 0:
                    continue
                c1 = -(m[0, 1] * x2 + m[0, 2] * x3 + m[0, 3] * x4)
                r1 = math.sqrt(rem2 / a[0]) + EPS
                base = base34 + h1 * x2 * x2 + A[1, 2] * x2 * x3 + A[1, 3] * x2 * x4
                lin = A[0, 1] * x2 + A[0, 2] * x3 + A[0, 3] * x4
                for x1 in range(_ceil_i(c1 - r1 - EPS), _floor_i(c1 + r1 + EPS) + 1):
                    v = base + h0 * x1 * x1 + lin * x1
                    if 0 <= v <= N:
                        out[v] += 1

    @njit(parallel=True, cache=True)
    def _count_representations_numba(A, a, m, N, nshards):
        budget = N * (1 + EPS) + EPS
        r4 = math.sqrt(budget / a[3]) + EPS
        lo4 = _ceil_i(-r4 - EPS)
        hi4 = _floor_i(r4 + EPS)
        span = hi4 - lo4 + 1
        tallies = np.zeros((nshards, N + 1), dtype=np.int64)
        for s in prange(nshards):
            for k in range(s, span, nshards):
                _enumerate_x4(A, a, m, N, lo4 + k, tallies[s])
        out = np.zeros(N + 1, dtype=np.int64)
        for s in range(nshards):
            out += tallies[s]
        return out


def count_representations(A, a, m, N: int) -> np.ndarray:
    """r(n) for 0 <= n <= N given an integral Gram A and its float Jacobi data."""
    A = np.ascontiguousarray(A, dtype=np.int64)
    a = np.ascontiguousarray(a, dtype=np.float64)
    m = np.ascontiguousarray(m, dtype=np.float64)
    if numba_enabled():
        return _count_representations_numba(A, a, m, int(N), thread_count())
    return count_representations_numpy(A, a, m, int(N))


# -- residue histograms mod M ------------------------------------------------------------

def residue_histograms_numpy(A, q: int, M: int, dim: int):
    """(total, zero, good) histograms of Q(x) mod M over x in (Z/M)^dim.

    Zero: x = 0 mod q.  Good: A x != 0 mod q.  Bad is the remainder.
    """
    A = np.asarray(A, dtype=np.int64)[:dim, :dim]
    total = np.zeros(M, dtype=np.int64)
    zero = np.zeros(M, dtype=np.int64)
    good = np.zeros(M, dtype=np.int64)
    r = np.arange(M, dtype=np.int64)
    # vectorize over the first dim-1 coordinates; loop the last one
    grids = np.meshgrid(*([r] * (dim - 1)), indexing="ij")
    head = np.stack([g.ravel() for g in grids], axis=1)
    for xl in range(M):
        X = np.concatenate([head, np.full((head.shape[0], 1), xl, dtype=np.int64)], axis=1)
        vals = (np.einsum("ki,ij,kj->k", X, A, X) // 2) % M
        Ax = (X @ A) % q
        is_good = (Ax != 0).any(axis=1)
        is_zero = ((X % q) == 0).all(axis=1)
        total += np.bincount(vals, minlength=M)
        good += np.bincount(vals[is_good], minlength=M)
        zero += np.bincount(vals[is_zero], minlength=M)
    return total, zero, good


if HAVE_NUMBA:

    @njit(cache=True)
    def _residue_histograms_numba(A, q, M, dim):
        total = np.zeros(M, dtype=np.int64)
        zero = np.zeros(M, dtype=np.int64)
        good = np.zeros(M, dtype=np.int64)
        r4 = M if dim == 4 else 1
        h0 = A[0, 0] // 2
        h1 = A[1, 1] // 2
        h2 = A[2, 2] // 2
        h3 = A[3, 3] // 2 if dim == 4 else 0
        for x4 in range(r4):
            for x3 in range(M):
                for x2 in range(M):
                    for x1 in range(M):
                        v = (
                            h0 * x1 * x1 + h1 * x2 * x2 + h2 * x3 * x3 + h3 * x4 * x4
                            + A[0, 1] * x1 * x2 + A[0, 2] * x1 * x3 + A[1, 2] * x2 * x3
                        )
                        if dim == 4:
                            v += A[0, 3] * x1 * x4 + A[1, 3] * x2 * x4 + A[2, 3] * x3 * x4
                        v %= M
                        total[v] += 1
                        if x1 % q == 0 and x2 % q == 0 and x3 % q == 0 and x4 % q == 0:
                            zero[v] += 1
                            continue
                        isgood = False
                        for i in range(dim):
                            s = A[i, 0] * x1 + A[i, 1] * x2 + A[i, 2] * x3
                            if dim == 4:
                                s += A[i, 3] * x4
                            if s % q != 0:
                                isgood = True
                                break
                        if isgood:
                            good[v] += 1
        return total, zero, good


def residue_histograms(A, q: int, M: int, dim: int = 4):
    A4 = np.zeros((4, 4), dtype=np.int64)
    A = np.asarray(A, dtype=np.int64)
    A4[:dim, :dim] = A[:dim, :dim]
    if numba_enabled():
        return _residue_histograms_numba(A4, int(q), int(M), int(dim))
    return residue_histograms_numpy(A4, int(q), int(M), int(dim))


# -- cyclic convolution of residue distributions -------------------------------------

def cyclic_convolve_numpy(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    M = f.shape[0]
    out = np.zeros(M, dtype=np.int64)
    for t in np.flatnonzero(f):
        out += f[t] * np.roll(g, t)
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _cyclic_convolve_numba(f, g):
        M = f.shape[0]
        out = np.zeros(M, dtype=np.int64)
        for s in range(M):
            fs = f[s]
            if fs == 0:
                continue
            for t in range(M):
                gt = g[t]
                if gt != 0:
                    out[(s + t) % M] += fs * gt
        return out


def cyclic_convolve(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    f = np.ascontiguousarray(f, dtype=np.int64)
    g = np.ascontiguousarray(g, dtype=np.int64)
    if numba_enabled():
        return _cyclic_convolve_numba(f, g)
    return cyclic_convolve_numpy(f, g)
