"""Positive-definite integral quadratic forms Q(x) = 1/2 x^T A x.

A form is stored by its even-diagonal Gram matrix ``A``.  Reduction produces a
Jacobi decomposition

    Q = sum_i a_i (x_i + sum_{j>i} m_ij x_j)^2

on a basis with a_1 = min Q, a_{i+1}/a_i >= 3/4 and |m_ij| <= 1/2 (a
Hermite-Korkine-Zolotarev basis, which satisfies all three).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentError
from .exactmath import is_prime

Matrix = list[list[Fraction]]


# -- small exact linear algebra ------------------------------------------------

def _det_int(M: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant."""
    a = [list(map(int, row)) for row in M]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _inverse(M: Sequence[Sequence[int | Fraction]]) -> Matrix:
    n = len(M)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _transpose(A):
    return [list(col) for col in zip(*A)]


def _congruent(G, U):
    """U^T G U."""
    return _matmul(_matmul(_transpose(U), G), U)


def ldl(G: Sequence[Sequence[Fraction]]) -> tuple[list[Fraction], Matrix]:
    """G = M^T D M with M upper unitriangular; returns (diag D, M)."""
    n = len(G)
    a = [Fraction(0)] * n
    m = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        a[i] = Fraction(G[i][i]) - sum(a[k] * m[k][i] ** 2 for k in range(i))
        if a[i] <= 0:
            raise ArgumentError("Gram matrix is not positive definite")
        for j in range(i + 1, n):
            m[i][j] = (Fraction(G[i][j]) - sum(a[k] * m[k][i] * m[k][j] for k in range(i))) / a[i]
    return a, m


# -- lattice reduction on Gram matrices ------------------------------------------

def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _col_axpy(U, dst: int, src: int, k: int) -> None:
    """column dst -= k * column src."""
    for row in U:
        row[dst] -= k * row[src]


def _round_half_down(x: Fraction) -> int:
    # ties go toward zero so already-reduced |m| = 1/2 stays put
    f = math.floor(x)
    return f if x - f <= Fraction(1, 2) else f + 1


def lll_transform(G: Sequence[Sequence[Fraction]], delta: Fraction = Fraction(99, 100)) -> list[list[int]]:
    """Unimodular U such that the columns of U form an LLL-reduced basis for G."""
    n = len(G)
    U = _identity(n)
    k = 1
    while k < n:
        Gc = _congruent(G, U)
        a, m = ldl(Gc)
        for j in range(k - 1, -1, -1):
            r = _round_half_down(m[j][k])
            if r:
                _col_axpy(U, k, j, r)
                Gc = _congruent(G, U)
                a, m = ldl(Gc)
        if a[k] >= (delta - m[k - 1][k] ** 2) * a[k - 1]:
            k += 1
        else:
            for row in U:
                row[k], row[k - 1] = row[k - 1], row[k]
            k = max(k - 1, 1)
    return U


def short_vectors(G: Sequence[Sequence[Fraction]], bound: Fraction) -> list[tuple[Fraction, tuple[int, ...]]]:
    """All nonzero x with x^T G x <= bound, up to sign (first nonzero entry positive)."""
    n = len(G)
    a, m = ldl(G)
    af = [float(x) for x in a]
    mf = [[float(x) for x in row] for row in m]
    bf = float(bound) * (1 + 1e-9) + 1e-9
    out: list[tuple[Fraction, tuple[int, ...]]] = []
    x = [0] * n

    def rec(i: int, rem: float) -> None:
        c = -sum(mf[i][j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(rem, 0.0) / af[i])
        for xi in range(math.ceil(c - r - 1e-9), math.floor(c + r + 1e-9) + 1):
            x[i] = xi
            used = af[i] * (xi - c) ** 2
            if i == 0:
                if any(x):
                    out.append(tuple(x))
            else:
                rec(i - 1, rem - used)
        x[i] = 0

    rec(n - 1, bf)
    result = []
    for v in out:
        first = next(t for t in v if t != 0)
        if first < 0:
            continue
        val = sum(Fraction(G[i][j]) * v[i] * v[j] for i in range(n) for j in range(n))
        if val <= bound:
            result.append((val, v))
    result.sort()
    return result


def _shortest(G: Sequence[Sequence[Fraction]]) -> tuple[int, ...]:
    n = len(G)
    V = lll_transform(G)
    Gr = _congruent(G, V)
    cands = short_vectors(Gr, min(Gr[i][i] for i in range(n)))
    best_val = cands[0][0]
    # ties: lexicographically smallest canonical coordinate vector
    best = min(v for val, v in cands if val == best_val)
    return tuple(sum(V[i][j] * best[j] for j in range(n)) for i in range(n))


def _complete_basis(y: Sequence[int]) -> list[list[int]]:
    """Unimodular V whose first column is the primitive vector y."""
    m = len(y)
    v = list(y)
    Vinv = _identity(m)  # tracks R^{-1} while row ops R drive v to e_1
    while sum(1 for t in v if t) > 1:
        i = min((k for k in range(m) if v[k]), key=lambda k: abs(v[k]))
        for j in range(m):
            if j != i and v[j]:
                q = v[j] // v[i]
                v[j] -= q * v[i]
                for row in Vinv:  # row_j -= q row_i  <=>  col_i += q col_j on the inverse
                    row[i] += q * row[j]
    i = next(k for k in range(m) if v[k])
    if abs(v[i]) != 1:
        raise ArgumentError("vector is not primitive")
    if i != 0:
        v[0], v[i] = v[i], v[0]
        for row in Vinv:
            row[0], row[i] = row[i], row[0]
    if v[0] < 0:
        for row in Vinv:
            row[0] = -row[0]
    return Vinv


def hkz_transform(G: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Unimodular U whose columns form a size-reduced HKZ basis of G."""
    n = len(G)
    U = lll_transform(G)
    for k in range(n):
        Gc = _congruent(G, U)
        if k == 0:
            S = Gc
        else:
            # projected Gram = Schur complement of the leading k x k block
            top_inv = _inverse([row[:k] for row in Gc[:k]])
            S = [
                [Gc[i][j] - sum(Gc[i][s] * top_inv[s][t] * Gc[t][j] for s in range(k) for t in range(k)) for j in range(k, n)]
                for i in range(k, n)
            ]
        y = _shortest(S)
        V = _complete_basis(y)
        tail = [row[k:] for row in U]
        new_tail = _matmul(tail, V)
        for r in range(n):
            U[r][k:] = new_tail[r]
    # size reduction leaves the a_i untouched
    for j in range(1, n):
        for i in range(j - 1, -1, -1):
            _, m = ldl(_congruent(G, U))
            r = _round_half_down(m[i][j])
            if r:
                _col_axpy(U, j, i, r)
    return U


# -- forms -------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadForm:
    """Q(x) = 1/2 x^T A x with A symmetric, even diagonal, positive definite."""

    gram: tuple[tuple[int, ...], ...]
    disc: int = field(compare=False)
    level: int = field(compare=False)

    @property
    def dim(self) -> int:
        return len(self.gram)

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.array(self.gram, dtype=np.int64)

    @cached_property
    def half_gram(self) -> Matrix:
        return [[Fraction(x, 2) for x in row] for row in self.gram]

    def __call__(self, x: Sequence[int]) -> int:
        A = self.gram
        n = self.dim
        twice = sum(A[i][j] * x[i] * x[j] for i in range(n) for j in range(n))
        return twice // 2

    @property
    def is_prime_disc(self) -> bool:
        return is_prime(self.disc)

    def to_json(self) -> str:
        return json.dumps([x for row in self.gram for x in row])

    def to_csv(self) -> str:
        n = self.dim
        return ",".join(str(self.gram[i][j]) for i in range(n) for j in range(i, n))


def from_gram(entries: Iterable[Iterable[int]] | np.ndarray) -> QuadForm:
    """Validate a Gram matrix and build a QuadForm with cached disc and level."""
    rows = [[int(x) for x in row] for row in entries]
    n = len(rows)
    if n not in (3, 4) or any(len(r) != n for r in rows):
        raise ArgumentError("Gram matrix must be 4x4 (or 3x3 for ternary sections)")
    for i in range(n):
        if rows[i][i] % 2:
            raise ArgumentError(f"diagonal entry {i} is odd")
        for j in range(i):
            if rows[i][j] != rows[j][i]:
                raise ArgumentError(f"Gram matrix not symmetric at ({j},{i})")
    for k in range(1, n + 1):
        if _det_int([r[:k] for r in rows[:k]]) <= 0:
            raise ArgumentError("Gram matrix is not positive definite")
    disc = _det_int(rows)
    return QuadForm(tuple(map(tuple, rows)), disc, _level_of(rows, disc))


def from_json(text: str) -> QuadForm:
    data = json.loads(text)
    if len(data) == 4 and all(isinstance(r, list) for r in data):
        return from_gram(data)
    if len(data) != 16:
        raise ArgumentError("expected 16 integers (row-major 4x4 Gram)")
    return from_gram([data[4 * i : 4 * i + 4] for i in range(4)])


def from_csv(text: str) -> QuadForm:
    vals = [int(t) for t in text.replace("\n", ",").split(",") if t.strip()]
    if len(vals) != 10:
        raise ArgumentError("expected 10 integers (upper triangle of a 4x4 Gram)")
    A = [[0] * 4 for _ in range(4)]
    it = iter(vals)
    for i in range(4):
        for j in range(i, 4):
            A[i][j] = A[j][i] = next(it)
    return from_gram(A)


def _adjugate(rows: Sequence[Sequence[int]], disc: int) -> list[list[int]]:
    inv = _inverse(rows)
    return [[int(x * disc) for x in row] for row in inv]


def _level_of(rows: Sequence[Sequence[int]], disc: int) -> int:
    adj = _adjugate(rows, disc)
    N = 1
    n = len(rows)
    for i in range(n):
        for j in range(n):
            if i == j:
                need = (2 * disc) // math.gcd(2 * disc, adj[i][i])
            else:
                need = disc // math.gcd(disc, adj[i][j])
            N = math.lcm(N, need)
    return N


def level(Q: QuadForm) -> int:
    """Smallest N with N A^{-1} integral with even diagonal."""
    return Q.level


def dual(Q: QuadForm) -> QuadForm:
    """The form 1/2 x^T (N A^{-1}) x."""
    adj = _adjugate(Q.gram, Q.disc)
    G = [[Q.level * x // Q.disc for x in row] for row in adj]
    return from_gram(G)


@dataclass(frozen=True)
class JacobiDecomp:
    """Exact reduced decomposition of a form and the matching dual data.

    ``basis`` holds the reducing unimodular transform U (columns are the
    reduced basis); ``reduced_gram`` is U^T A U.  ``n_dual`` is the lower
    unitriangular coefficient array of the dual decomposition with
    coefficients ``a_star``.
    """

    a: tuple[Fraction, ...]
    m: tuple[tuple[Fraction, ...], ...]
    a_star: tuple[Fraction, ...] | None
    n_dual: tuple[tuple[Fraction, ...], ...]
    basis: tuple[tuple[int, ...], ...]
    reduced_gram: tuple[tuple[int, ...], ...]

    def as_float(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([float(x) for x in self.a]), np.array([[float(x) for x in row] for row in self.m])

    def expand(self) -> Matrix:
        """M^T D M, which must equal half the reduced Gram matrix."""
        n = len(self.a)
        return [
            [sum(self.a[k] * self.m[k][i] * self.m[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]


_DECOMP_CACHE: dict[tuple, JacobiDecomp] = {}


def jacobi_decompose(Q: QuadForm) -> JacobiDecomp:
    """Reduce Q and return its exact Jacobi decomposition."""
    hit = _DECOMP_CACHE.get(Q.gram)
    if hit is not None:
        return hit
    U = hkz_transform(Q.half_gram)
    Ared = _congruent([list(r) for r in Q.gram], U)
    half = [[Fraction(x, 2) for x in row] for row in Ared]
    a, m = ldl(half)
    n = len(a)
    minv = _inverse(m)
    n_dual = _transpose(minv)
    a_star = tuple(Fraction(Q.disc, 4) / ai for ai in a) if is_prime(Q.disc) else None
    dec = JacobiDecomp(
        a=tuple(a),
        m=tuple(tuple(row) for row in m),
        a_star=a_star,
        n_dual=tuple(tuple(row) for row in n_dual),
        basis=tuple(tuple(r) for r in U),
        reduced_gram=tuple(tuple(int(x) for x in row) for row in Ared),
    )
    if len(_DECOMP_CACHE) < 4096:
        _DECOMP_CACHE[Q.gram] = dec
    return dec


def min_nonzero(Q: QuadForm) -> int:
    """Smallest positive value of Q, by enumeration over an LLL-reduced basis."""
    G = Q.half_gram
    U = lll_transform(G)
    Gr = _congruent(G, U)
    bound = min(Gr[i][i] for i in range(Q.dim))
    vals = short_vectors(Gr, bound)
    return int(vals[0][0])
