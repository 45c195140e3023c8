"""Exact integer and rational arithmetic used throughout the package.

Python integers are arbitrary precision, so they serve directly as the wide
integer type; :class:`fractions.Fraction` is the rational type.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import ArgumentError, ResourceError

FACTOR_LIMIT = 2**64
MAX_TAU_LIMIT = 2**128
TRIAL_LIMIT = 10**6

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@lru_cache(maxsize=None)
def _prime_table(limit: int = TRIAL_LIMIT) -> np.ndarray:
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    table = np.flatnonzero(sieve)
    table.setflags(write=False)
    return table


def primes_up_to(limit: int) -> list[int]:
    """All primes <= limit, as Python ints."""
    if limit <= TRIAL_LIMIT:
        table = _prime_table()
        return table[: np.searchsorted(table, limit, side="right")].tolist()
    return _prime_table(limit).tolist()


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic for n < 3.3e24 (first 13 prime bases)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _factor_unbounded(n: int) -> dict[int, int]:
    factors: dict[int, int] = {}
    for p in _prime_table():
        p = int(p)
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors[p] = e
    if n == 1:
        return factors
    # fixed seed: factorization output must not depend on global RNG state
    rng = random.Random(n)
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        d = _pollard_brent(m, rng)
        stack.extend((d, m // d))
    return dict(sorted(factors.items()))


def factorize(n: int) -> dict[int, int]:
    """Prime factorization {p: e} of 1 <= n <= 2**64."""
    n = int(n)
    if n < 1 or n > FACTOR_LIMIT:
        raise ArgumentError(f"factorize needs 1 <= n <= 2**64, got {n}")
    return _factor_unbounded(n)


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ArgumentError("valuation of 0 is infinite")
    n, v = abs(n), 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class Multiplicative(NamedTuple):
    phi: int
    tau: int
    sigma: int
    mu: int
    omega: int


def multiplicative_bundle(n: int) -> Multiplicative:
    """Euler phi, divisor count, divisor sum, Moebius and distinct-prime count of n."""
    fac = factorize(n)
    phi = tau = sigma = 1
    for p, e in fac.items():
        phi *= (p - 1) * p ** (e - 1)
        tau *= e + 1
        sigma *= (p ** (e + 1) - 1) // (p - 1)
    mu = 0 if any(e > 1 for e in fac.values()) else (-1) ** len(fac)
    return Multiplicative(phi, tau, sigma, mu, len(fac))


def _check_odd_prime(p: int) -> None:
    if p < 3 or not is_prime(p):
        raise ArgumentError(f"modulus must be an odd prime, got {p}")


def kronecker(p: int, n: int) -> int:
    """Legendre symbol (n | p) for an odd prime p."""
    _check_odd_prime(p)
    r = n % p
    if r == 0:
        return 0
    return 1 if pow(r, (p - 1) // 2, p) == 1 else -1


class CharacterMod:
    """The quadratic character chi_p as a lookup table over residues."""

    def __init__(self, p: int):
        _check_odd_prime(p)
        self.modulus = p
        table = np.zeros(p, dtype=np.int8)
        squares = np.unique((np.arange(1, p, dtype=np.int64) ** 2) % p)
        table[1:] = -1
        table[squares] = 1
        table.setflags(write=False)
        self.table = table

    def __call__(self, n: int) -> int:
        return int(self.table[n % self.modulus])

    def values(self, ns: np.ndarray) -> np.ndarray:
        return self.table[np.asarray(ns) % self.modulus].astype(np.int64)


# -- sieve tables for whole ranges ------------------------------------------

def divisor_tables(N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Arrays (phi, tau, sigma) indexed 0..N; index 0 holds zeros."""
    idx = np.arange(N + 1, dtype=np.int64)
    tau = np.zeros(N + 1, dtype=np.int64)
    sigma = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        tau[d::d] += 1
        sigma[d::d] += d
    phi = idx.copy()
    for p in primes_up_to(N):
        phi[p::p] -= phi[p::p] // p
    phi[0] = 0
    return phi, tau, sigma


# -- record divisor counts ---------------------------------------------------

def _primorial_primes(X: int) -> list[int]:
    out, prod, candidate = [], 1, 2
    while True:
        while not is_prime(candidate):
            candidate += 1
        if prod * candidate > X:
            return out
        prod *= candidate
        out.append(candidate)
        candidate += 1


def max_tau(X: int) -> tuple[int, int]:
    """Largest divisor count among 1..X and the smallest m <= X attaining it.

    Depth-first search over non-increasing exponent vectors on consecutive
    primes; any m has a rearrangement of that shape that is <= m with equal tau.
    """
    X = int(X)
    if X < 1:
        raise ArgumentError("max_tau needs X >= 1")
    if X > MAX_TAU_LIMIT:
        raise ArgumentError("max_tau supports X <= 2**128")
    primes = _primorial_primes(X)
    best = [1, 1]

    def dfs(i: int, m: int, tau: int, cap: int) -> None:
        if tau > best[0] or (tau == best[0] and m < best[1]):
            best[0], best[1] = tau, m
        if i == len(primes):
            return
        p = primes[i]
        room = X // m
        if room < p:
            return
        # (e + 1) <= 2**e, and the remaining exponents sum to at most log_p(room)
        if tau << int(math.log(room) / math.log(p) + 1e-9) < best[0]:
            return
        mm = m
        for e in range(1, cap + 1):
            mm *= p
            if mm > X:
                break
            dfs(i + 1, mm, tau * (e + 1), e)

    dfs(0, 1, 1, X.bit_length())
    return best[0], best[1]


# -- exact roots and radical monomials ---------------------------------------

def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 0 or k < 1:
        raise ArgumentError("iroot needs n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def floor_monomial(coef: Fraction | int, factors: dict[Fraction, Fraction] | None = None) -> int:
    """Exact floor of coef * prod(base ** exponent) with positive rational bases."""
    coef = Fraction(coef)
    factors = factors or {}
    denom = 1
    for e in factors.values():
        denom = math.lcm(denom, Fraction(e).denominator)
    # y = coef * prod(...) ; y**denom is rational
    power = abs(coef) ** denom
    for base, e in factors.items():
        base = Fraction(base)
        if base <= 0:
            raise ArgumentError("radical bases must be positive")
        power *= base ** int(Fraction(e) * denom)
    if coef >= 0:
        return iroot(power.numerator // power.denominator, denom)
    # floor(-y) = -ceil(y)
    root = iroot(power.numerator // power.denominator, denom)
    exact = Fraction(root) ** denom == power
    return -root if exact else -root - 1


def floor_scaled_power(coef: Fraction | int, base: int, exponent: Fraction) -> int:
    """floor(coef * base ** exponent), e.g. floor(25.09 * 101 ** (35/6))."""
    return floor_monomial(coef, {Fraction(base): Fraction(exponent)})


@lru_cache(maxsize=4096)
def max_tau_scaled(coef: Fraction, base: int, exponent: Fraction) -> int:
    """M(floor(coef * base**exponent)); callers pass hashable Fractions."""
    return max_tau(max(1, floor_scaled_power(coef, base, exponent)))[0]


# -- L(-1, chi_p) -------------------------------------------------------------

def l_value_minus1(p: int) -> Fraction:
    """L(-1, chi_p) = -B_{2,chi}/2 via the generalized Bernoulli number."""
    if p % 4 != 1 or not is_prime(p):
        raise ArgumentError(f"need a prime p = 1 mod 4, got {p}")
    if p > 10**7:
        raise ResourceError("Bernoulli sum over p terms too large")
    chi = CharacterMod(p)
    # sum chi(a) * (a^2/p^2 - a/p + 1/6) ; the 1/6 term vanishes since sum chi = 0
    a = np.arange(1, p, dtype=object)
    signs = chi.values(np.arange(1, p))
    s2 = sum(int(c) * int(x) * int(x) for c, x in zip(signs, a))
    s1 = sum(int(c) * int(x) for c, x in zip(signs, a))
    inner = Fraction(s2, p * p) - Fraction(s1, p)
    bernoulli = p * inner
    return -bernoulli / 2


@lru_cache(maxsize=256)
def l_value_minus1_cached(p: int) -> Fraction:
    return l_value_minus1(p)
