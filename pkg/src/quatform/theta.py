"""Representation numbers and the Eisenstein/cusp split of the theta series."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import ArgumentError, ResourceError, UnsupportedFormError
from .exactmath import CharacterMod, is_prime, l_value_minus1_cached, multiplicative_bundle
from .qform import QuadForm, dual, jacobi_decompose

MAX_CUTOFF = 5 * 10**7


def _enumeration_data(Q: QuadForm, N: int):
    dec = jacobi_decompose(Q)
    gram = np.array(dec.reduced_gram, dtype=np.int64)
    a, m = dec.as_float()
    if Q.dim == 3:
        # a fourth coordinate whose smallest nonzero value already exceeds N
        guard = N + 1
        g4 = np.zeros((4, 4), dtype=np.int64)
        g4[:3, :3] = gram
        g4[3, 3] = 2 * guard
        m4 = np.eye(4)
        m4[:3, :3] = m
        return g4, np.append(a, float(guard)), m4
    return gram, a, m


def representation_counts(Q: QuadForm, N: int) -> np.ndarray:
    """r_Q(n) for 0 <= n <= N as an int64 array."""
    N = int(N)
    if N < 0:
        raise ArgumentError("N must be nonnegative")
    if N > MAX_CUTOFF:
        raise ResourceError(f"cutoff {N} exceeds the enumeration budget {MAX_CUTOFF}")
    gram, a, m = _enumeration_data(Q, N)
    return _kernels.count_representations(gram, a, m, N)


def _require_prime_disc(Q: QuadForm) -> int:
    p = Q.disc
    if Q.dim != 4 or not is_prime(p) or p % 4 != 1:
        raise UnsupportedFormError(f"need a quaternary form of prime discriminant, got disc {p}")
    return p


def _divisor_sum(N: int, weight) -> np.ndarray:
    """out[n] = sum over d | n of weight(d, n // d), for 1 <= n <= N."""
    out = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        k = np.arange(1, N // d + 1, dtype=np.int64)
        out[d::d] += weight(d, k)
    return out


def eisenstein_sums(p: int, N: int) -> np.ndarray:
    """Integer sums S(n) = sum_{d | n} (p n/d - d) chi_p(d); a_E(n) = -2 S(n) / L(-1, chi_p)."""
    chi = CharacterMod(p)
    return _divisor_sum(N, lambda d, k: (p * k - d) * chi(d))


def eisenstein_dual_sums(p: int, N: int) -> np.ndarray:
    """Integer sums T(n) = sum_{d | n} d (chi_p(d) - chi_p(n/d)); a_E*(n) = 2 T(n) / L(-1, chi_p)."""
    chi = CharacterMod(p)
    return _divisor_sum(N, lambda d, k: d * (chi(d) - chi.values(k)))


def eisenstein_coeffs(Q: QuadForm, N: int) -> list[Fraction]:
    p = _require_prime_disc(Q)
    L = l_value_minus1_cached(p)
    S = eisenstein_sums(p, int(N))
    return [Fraction(1)] + [Fraction(-2 * int(s)) / L for s in S[1:]]


def eisenstein_dual_coeffs(Q: QuadForm, N: int) -> list[Fraction]:
    """a_E*(n) for 0 <= n <= N; index 0 holds a_E*(0) = 1 for alignment."""
    p = _require_prime_disc(Q)
    L = l_value_minus1_cached(p)
    T = eisenstein_dual_sums(p, int(N))
    return [Fraction(1)] + [Fraction(2 * int(t)) / L for t in T[1:]]


@dataclass(frozen=True)
class ThetaBlock:
    N: int
    r: np.ndarray
    aE: tuple[Fraction, ...]
    aC: tuple[Fraction, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "r", "aE_num", "aE_den", "aC_num", "aC_den"])
        for n in range(self.N + 1):
            e, c = self.aE[n], self.aC[n]
            w.writerow([n, int(self.r[n]), e.numerator, e.denominator, c.numerator, c.denominator])
        return buf.getvalue()


def cusp_coeffs(block: ThetaBlock) -> list[Fraction]:
    if len(block.r) != len(block.aE):
        raise ArgumentError("representation and Eisenstein arrays differ in length")
    return [int(r) - e for r, e in zip(block.r, block.aE)]


def theta_block(Q: QuadForm, N: int) -> ThetaBlock:
    r = representation_counts(Q, N)
    aE = eisenstein_coeffs(Q, N)
    aC = [Fraction(0)] + [int(r[n]) - aE[n] for n in range(1, N + 1)]
    return ThetaBlock(int(N), r, tuple(aE), tuple(aC))


def dual_cusp_coeffs(Q: QuadForm, N: int) -> tuple[np.ndarray, list[Fraction], list[Fraction]]:
    """(r_Q*, a_E*, a_C*) for 0 <= n <= N, with a_C*(0) = 0."""
    rs = representation_counts(dual(Q), N)
    aEs = eisenstein_dual_coeffs(Q, N)
    aCs = [Fraction(0)] + [int(rs[n]) - aEs[n] for n in range(1, N + 1)]
    return rs, aEs, aCs


@dataclass(frozen=True)
class RadicalBound:
    """The number num / p**(3/2), kept exact."""

    num: int
    p: int

    def __float__(self) -> float:
        return self.num / self.p**1.5

    def is_at_most(self, x: Fraction | int) -> bool:
        """Exact test num / p^{3/2} <= x, by squaring."""
        x = Fraction(x)
        if self.num <= 0:
            return x >= 0 or x * x <= Fraction(self.num * self.num, self.p**3)
        return x > 0 and x * x * self.p**3 >= self.num * self.num


def eisenstein_lower_bound(p: int, n: int) -> RadicalBound:
    """24 (p - 1) phi(n) / p^{3/2}."""
    if n < 1:
        raise ArgumentError("n must be positive")
    return RadicalBound(24 * (p - 1) * multiplicative_bundle(n).phi, p)
