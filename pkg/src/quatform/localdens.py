"""Local densities by counting solutions mod q^v, split into Good/Zero/Bad types.

For odd q the form is diagonalized over the q-adic integers and counts are
computed through the Zero, Bad-I and Bad-II reduction maps, which bring every
count down to Good-type counts mod q.  For q = 2 with odd discriminant there
are no Bad vectors and Good counts stabilize from 2^3 on; otherwise q = 2 is
counted directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import ArgumentError, ResourceError, UnsupportedFormError
from .exactmath import CharacterMod, factorize, is_prime, kronecker, primes_up_to, valuation
from .qform import QuadForm

DIRECT_BUDGET = 2**26
DIRECT_MODULUS = 3 * 10**4


@dataclass(frozen=True)
class TypeCounts:
    q: int
    v: int
    n: int
    good: int
    zero: int
    bad: int

    @property
    def total(self) -> int:
        return self.good + self.zero + self.bad


@dataclass(frozen=True)
class LocalDensityReport:
    q: int
    n: int
    beta: Fraction
    stabilized_at: int
    counts: TypeCounts

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "v": self.stabilized_at,
            "good": self.counts.good,
            "zero": self.counts.zero,
            "bad": self.counts.bad,
            "beta_num": self.beta.numerator,
            "beta_den": self.beta.denominator,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _check_prime(q: int) -> None:
    if not is_prime(q):
        raise ArgumentError(f"q must be prime, got {q}")


# -- q-adic diagonalization ----------------------------------------------------------

def _qval(x: Fraction, q: int) -> int:
    if x == 0:
        return 10**9
    return valuation(x.numerator, q) - valuation(x.denominator, q)


def local_normal_form(Q: QuadForm, q: int) -> list[tuple[int, Fraction]]:
    """Diagonal q-adic model of Q: [(v_j, u_j)] with Q ~ sum q^{v_j} u_j x_j^2, v_j ascending."""
    _check_prime(q)
    if q == 2:
        raise UnsupportedFormError("the local normal form is only diagonal at odd q")
    B = [list(row) for row in Q.half_gram]
    n = len(B)
    blocks: list[tuple[int, Fraction]] = []
    active = list(range(n))
    while active:
        best = None
        for i in active:
            for j in active:
                if j < i:
                    continue
                v = _qval(B[i][j], q)
                # diagonal pivots win ties
                key = (v, 0 if i == j else 1, i, j)
                if best is None or key < best:
                    best = key
        _, _, i, j = best
        if i != j:
            # x_i -> x_i + x_j makes the diagonal entry carry the minimal valuation
            for k in range(n):
                B[k][i] += B[k][j]
            for k in range(n):
                B[i][k] += B[j][k]
        piv = B[i][i]
        for r in active:
            if r == i:
                continue
            f = B[r][i] / piv
            for c in active:
                B[r][c] -= f * B[i][c]
        for r in active:
            if r != i:
                B[r][i] = B[i][r] = Fraction(0)
        v = _qval(piv, q)
        blocks.append((v, piv / Fraction(q) ** v))
        active.remove(i)
    blocks.sort(key=lambda b: b[0])
    return blocks


def _signature(Q: QuadForm, q: int) -> tuple[tuple[int, int], ...]:
    """Sorted (valuation, Legendre symbol of unit) pairs; the q-adic class for counting."""
    out = []
    for v, u in local_normal_form(Q, q):
        out.append((v, kronecker(q, u.numerator * pow(u.denominator, -1, q))))
    return tuple(sorted(out))


# -- recursive counting for odd q ------------------------------------------------------

@lru_cache(maxsize=None)
def _nonresidue(q: int) -> int:
    chi = CharacterMod(q)
    return next(a for a in range(2, q) if chi(a) == -1)


@lru_cache(maxsize=4096)
def _unit_distribution(q: int, symbols: tuple[int, ...]) -> np.ndarray:
    """#{x in (Z/q)^s : sum u_j x_j^2 = m} for each m, u_j from Legendre symbols."""
    out = np.zeros(q, dtype=np.int64)
    out[0] = 1
    squares = (np.arange(q, dtype=np.int64) ** 2) % q
    for eps in symbols:
        u = 1 if eps == 1 else _nonresidue(q)
        one = np.bincount((u * squares) % q, minlength=q).astype(np.int64)
        out = _kernels.cyclic_convolve(out, one)
    out.setflags(write=False)
    return out


def _split(sig):
    s0 = tuple(e for v, e in sig if v == 0)
    s1 = sum(1 for v, _ in sig if v == 1)
    s2 = sum(1 for v, _ in sig if v >= 2)
    return s0, s1, s2


def _good1(q: int, sig, m: int) -> int:
    s0, _, _ = _split(sig)
    d = len(sig)
    dist = _unit_distribution(q, s0)
    m %= q
    return q ** (d - len(s0)) * (int(dist[m]) - (1 if m == 0 else 0))


def _good(q: int, sig, k: int, n: int) -> int:
    return q ** ((len(sig) - 1) * (k - 1)) * _good1(q, sig, n)


def _zero(q: int, sig, k: int, n: int) -> int:
    if k == 1:
        return 1 if n % q == 0 else 0
    if n % (q * q):
        return 0
    return q ** len(sig) * _total(q, sig, k - 2, n // (q * q))


def _shift(sig, rule) -> tuple[tuple[int, int], ...]:
    return tuple(sorted((rule(v), e) for v, e in sig))


def _bad_one(q: int, sig, k: int, n: int) -> int:
    if n % q:
        return 0
    s0, _, _ = _split(sig)
    sig1 = _shift(sig, lambda v: 1 if v == 0 else v - 1)
    return q ** (len(sig) - len(s0)) * _good(q, sig1, k - 1, n // q)


def _bad_two(q: int, sig, k: int, n: int) -> int:
    if n % (q * q):
        return 0
    s0, s1, s2 = _split(sig)
    if s2 == 0:
        return 0
    low = len(s0) + s1
    if k == 2:
        return q**low * (q ** (2 * s2) - q**s2)
    sig2 = _shift(sig, lambda v: v if v < 2 else v - 2)
    sig3 = _shift(sig, lambda v: v)
    m = n // (q * q)
    inner = _total(q, sig2, k - 2, m)
    fiber = _total(q, sig3, k - 2, m)
    if fiber % q**s2:
        raise AssertionError("Bad-II fiber count is not divisible as expected")
    return q ** (low + 2 * s2) * (inner - fiber // q**s2)


@lru_cache(maxsize=None)
def _types(q: int, sig, k: int, n: int) -> tuple[int, int, int]:
    n %= q**k
    if k == 1:
        total = q ** (len(sig) - len(_split(sig)[0])) * int(_unit_distribution(q, _split(sig)[0])[n % q])
        good = _good1(q, sig, n)
        zero = _zero(q, sig, 1, n)
        return good, zero, total - good - zero
    good = _good(q, sig, k, n)
    zero = _zero(q, sig, k, n)
    bad = _bad_one(q, sig, k, n) + _bad_two(q, sig, k, n)
    return good, zero, bad


def _total(q: int, sig, k: int, n: int) -> int:
    if k <= 0:
        return 1
    return sum(_types(q, sig, k, n))


# -- q = 2 -----------------------------------------------------------------------------

def _direct_types(Q: QuadForm, q: int, v: int, n: int) -> tuple[int, int, int]:
    M = q**v
    if M ** Q.dim > DIRECT_BUDGET:
        raise ResourceError(f"direct count over {q}^{v * Q.dim} vectors exceeds the budget")
    total, zero, good = _histograms(Q, q, v)
    r = n % M
    t, z, g = int(total[r]), int(zero[r]), int(good[r])
    return g, z, t - g - z


@lru_cache(maxsize=512)
def _histograms_cached(gram: tuple, dim: int, q: int, v: int):
    A = np.array(gram, dtype=np.int64)
    return _kernels.residue_histograms(A, q, q**v, dim)


def _histograms(Q: QuadForm, q: int, v: int):
    return _histograms_cached(Q.gram, Q.dim, q, v)


def _dyadic_types_odd_disc(Q: QuadForm, k: int, n: int) -> tuple[int, int, int]:
    """Odd discriminant: A is invertible mod 2, so every nonzero class mod 2 is Good."""
    n %= 2**k
    if k <= 3:
        return _direct_types(Q, 2, k, n)
    d = Q.dim
    good = 2 ** ((d - 1) * (k - 3)) * _direct_types(Q, 2, 3, n)[0]
    zero = 0
    if n % 4 == 0:
        zero = 2**d * _dyadic_total_odd_disc(Q, k - 2, n // 4)
    return good, zero, 0


def _dyadic_total_odd_disc(Q: QuadForm, k: int, n: int) -> int:
    if k <= 0:
        return 1
    return sum(_dyadic_types_odd_disc(Q, k, n))


# -- public API --------------------------------------------------------------------

def count_types(Q: QuadForm, q: int, v: int, n: int, mode: str = "auto") -> TypeCounts:
    """Good/Zero/Bad split of #{x mod q^v : Q(x) = n mod q^v}.

    mode "direct" enumerates all q^{dim v} vectors; "reduction" uses the
    reduction maps; "auto" prefers reduction whenever it is available.
    """
    _check_prime(q)
    if v < 1:
        raise ArgumentError("v must be >= 1")
    if mode not in ("auto", "direct", "reduction"):
        raise ArgumentError(f"unknown mode {mode!r}")
    n = int(n)
    reducible = q != 2 or Q.disc % 2 == 1
    if mode == "direct" or (mode == "auto" and not reducible):
        if q**v > DIRECT_MODULUS:
            raise ResourceError(f"q^v = {q**v} exceeds the direct-mode limit")
        g, z, b = _direct_types(Q, q, v, n)
    elif not reducible:
        raise ResourceError("reduction maps at q = 2 need an odd discriminant")
    elif q == 2:
        g, z, b = _dyadic_types_odd_disc(Q, v, n)
    else:
        g, z, b = _types(q, _signature(Q, q), v, n % q**v)
    return TypeCounts(q, v, n, g, z, b)


def _start_exponent(Q: QuadForm, q: int, n: int) -> int:
    base = 2 * valuation(n, q) + valuation(Q.disc, q)
    return base + (3 if q == 2 else 1)


def local_density(Q: QuadForm, q: int, n: int, max_tries: int = 6) -> LocalDensityReport:
    """beta_q(n) = r_{q^v}(n) / q^{(dim-1) v} at a v past which the ratio is constant."""
    _check_prime(q)
    if n < 1:
        raise ArgumentError("n must be positive")
    d = Q.dim
    v = _start_exponent(Q, q, n)
    prev = None
    for _ in range(max_tries):
        counts = count_types(Q, q, v, n)
        beta = Fraction(counts.total, q ** ((d - 1) * v))
        if prev is not None and prev[1] == beta:
            return LocalDensityReport(q, n, beta, prev[0], prev[2])
        prev = (v, beta, counts)
        v += 1
    raise ResourceError(f"beta_{q}({n}) did not stabilize by v = {v - 1}")


def beta_infinity(Q: QuadForm, n: int) -> float:
    if Q.dim != 4:
        raise UnsupportedFormError("the archimedean density formula is for quaternary forms")
    if n < 1:
        raise ArgumentError("n must be positive")
    return 4 * math.pi**2 * n / math.sqrt(Q.disc)


@dataclass(frozen=True)
class SiegelCheck:
    n: int
    cutoff: int
    product: float
    a_e: Fraction
    tail: float
    raw_deviation: float
    deviation: float


def siegel_product_check(Q: QuadForm, n: int, B: int = 500, tail_limit: int = 10**5) -> SiegelCheck:
    """Compare beta_inf * prod_{q <= B} beta_q(n) with the closed-form a_E(n).

    ``raw_deviation`` is |product / a_E - 1|; ``deviation`` first multiplies the
    product by prod_{B < q <= tail_limit, q not dividing 2pn} (1 - chi_p(q)/q^2).
    """
    from .theta import eisenstein_coeffs

    if n < 1:
        raise ArgumentError("n must be positive")
    if B < 50:
        raise ArgumentError("cutoff B must be at least 50")
    p = Q.disc
    a_e = eisenstein_coeffs(Q, n)[n]
    log_prod = math.log(beta_infinity(Q, n))
    for q in primes_up_to(B):
        beta = local_density(Q, q, n).beta
        if beta == 0:
            log_prod = -math.inf
            break
        log_prod += math.log(beta)
    product = math.exp(log_prod)
    chi = CharacterMod(p)
    tail_log = 0.0
    for q in primes_up_to(tail_limit):
        if q <= B or (2 * p * n) % q == 0:
            continue
        tail_log += math.log1p(-chi(q) / (q * q))
    tail = math.exp(tail_log)
    ae = float(a_e)
    return SiegelCheck(
        n, B, product, a_e, tail, abs(product / ae - 1), abs(product * tail / ae - 1)
    )


def is_locally_represented(Q: QuadForm, n: int) -> bool:
    """beta_q(n) > 0 at every prime q dividing 2 disc n; other primes never obstruct."""
    if n < 1:
        raise ArgumentError("n must be positive")
    primes = set(factorize(2 * Q.disc * n))
    return all(local_density(Q, q, n).beta > 0 for q in sorted(primes))
