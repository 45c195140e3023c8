"""Explicit constants, the truncated Petersson norm and the supporting inequalities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import ArgumentError, HypothesisError, UnsupportedFormError
from .exactmath import (
    divisor_tables,
    is_prime,
    max_tau,
    max_tau_scaled,
    multiplicative_bundle,
)
from .qform import QuadForm, dual, jacobi_decompose, min_nonzero
from .special import bessel_k, psi, psi_bound, psi_sum, psi_sum_many
from .theta import dual_cusp_coeffs, representation_counts

__all__ = [
    "Interval",
    "BoundReport",
    "bessel_k",
    "psi",
    "psi_bound",
    "psi_sum",
    "petersson_norm_estimate",
    "theorem2_bound",
    "newform_norm_lower_bound",
    "cuspform_dim",
    "theorem1_rhs",
    "sufficient_threshold",
    "rqstar_sum_checks",
    "exceptions_sum_report",
]

SLOP = 1e-12
THEOREM_MIN_P = 101
SUM_LEMMA_MIN_P = 17
THEOREM2_CONSTANT = 3216.66
CUSP_PART_CONSTANT = 3216.6524
THEOREM1_CONSTANT = 23.85
CUTOFF_COEF = Fraction(2509, 100)
CUTOFF_EXP = Fraction(35, 6)
POINTWISE_EXP = Fraction(29, 6)
EULER = 0.57721566490153286061
TAU_EXPONENT = 1.538 * math.log(2.0)


# -- intervals ------------------------------------------------------------------------

def _down(x: float) -> float:
    return math.nextafter(x, -math.inf)


def _up(x: float) -> float:
    return math.nextafter(x, math.inf)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ArgumentError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(_down(self.lo + other.lo), _up(self.hi + other.hi))

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(_down(self.lo - other.hi), _up(self.hi - other.lo))

    def __mul__(self, other: "Interval") -> "Interval":
        c = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(_down(min(c)), _up(max(c)))

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def widen(self, rel: float = SLOP) -> "Interval":
        return Interval(self.lo - abs(self.lo) * rel, self.hi + abs(self.hi) * rel)

    @property
    def width(self) -> float:
        return self.hi - self.lo


# -- hypotheses -----------------------------------------------------------------------

def _prime_disc(Q: QuadForm) -> int:
    p = Q.disc
    if Q.dim != 4 or not is_prime(p):
        raise UnsupportedFormError(f"need a quaternary form of prime discriminant, got disc {p}")
    return p


def _require(p: int, minimum: int, force: bool) -> None:
    if p < minimum and not force:
        raise HypothesisError(f"the constants are proved for p >= {minimum}; got p = {p} (use force)")


# -- closed-form constants ----------------------------------------------------------

def m_value(p: int) -> int:
    """M(25.09 p^{35/6})."""
    return max_tau_scaled(CUTOFF_COEF, p, CUTOFF_EXP)


def newform_norm_lower_bound(p: int) -> float:
    if p < 5:
        raise ArgumentError("p must be at least 5")
    return 3.0 * p / (208.0 * math.pi**4 * (p + 1) * math.log(p))


def cuspform_dim(p: int) -> int:
    if not is_prime(p) or p % 4 != 1:
        raise ArgumentError(f"need a prime p = 1 mod 4, got {p}")
    s = 2 * ((p - 5) // 24)
    assert 12 * s <= p
    return s


def theorem1_constant(p: int) -> float:
    """sqrt((1/12)(1 + 1/p)(208 pi^4 / 3)), which is <= 23.85 for p >= 101."""
    return math.sqrt((1.0 + 1.0 / p) * 208.0 * math.pi**4 / 36.0)


def theorem2_bound(Q: QuadForm, force: bool = False) -> float:
    p = _prime_disc(Q)
    _require(p, THEOREM_MIN_P, force)
    return 1.0 / min_nonzero(dual(Q)) + THEOREM2_CONSTANT * m_value(p) / p**0.25


@dataclass(frozen=True)
class BoundReport:
    p: int
    min_q_star: int
    m_value: int
    A: float
    B: float
    s: int
    C_Q_bound: float

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "min_q_star": self.min_q_star,
            "m_value": self.m_value,
            "A": self.A,
            "B": self.B,
            "s": self.s,
            "C_Q_bound": self.C_Q_bound,
        }


def bound_report(Q: QuadForm, force: bool = False) -> BoundReport:
    p = _prime_disc(Q)
    A = theorem2_bound(Q, force)
    B = newform_norm_lower_bound(p)
    s = cuspform_dim(p)
    return BoundReport(p, min_nonzero(dual(Q)), m_value(p), A, B, s, math.sqrt(A * s / B))


# -- lower bound for r_Q(n) ------------------------------------------------------------

def _theorem1_coeffs(Q: QuadForm, force: bool) -> tuple[float, float]:
    p = _prime_disc(Q)
    _require(p, THEOREM_MIN_P, force)
    c1 = 24.0 * (p - 1) / p**1.5
    c2 = THEOREM1_CONSTANT * math.sqrt(p * math.log(p) * theorem2_bound(Q, force=True))
    return c1, c2


def theorem1_rhs(Q: QuadForm, n: int, force: bool = False) -> float:
    """24 (p-1) phi(n) / p^{3/2} - 23.85 sqrt(p log p A) tau(n) sqrt(n)."""
    if n < 1:
        raise ArgumentError("n must be positive")
    c1, c2 = _theorem1_coeffs(Q, force)
    mb = multiplicative_bundle(n)
    return c1 * mb.phi - c2 * mb.tau * math.sqrt(n)


def theorem1_rhs_table(Q: QuadForm, N: int, force: bool = False) -> np.ndarray:
    """theorem1_rhs for 1 <= n <= N (index 0 is unused and holds nan)."""
    c1, c2 = _theorem1_coeffs(Q, force)
    phi, tau, _ = divisor_tables(N)
    out = c1 * phi.astype(float) - c2 * tau.astype(float) * np.sqrt(np.arange(N + 1, dtype=float))
    out[0] = math.nan
    return out


def largest_failing_n(Q: QuadForm, N: int, force: bool = False) -> int | None:
    """Largest n <= N at which theorem1_rhs is not positive (None if there is none)."""
    rhs = theorem1_rhs_table(Q, N, force)
    bad = np.flatnonzero(rhs[1:] <= 0)
    return int(bad[-1]) + 1 if bad.size else None


def _phi_lower_factor(L: float) -> float:
    """f with phi(n) > n / f(n), n >= 3, as a function of L = log n."""
    ll = math.log(L)
    return math.exp(EULER) * ll + 3.0 / ll


def _analytic_margin(L: float, c1: float, c2: float) -> float:
    """log of (c1 n / f(n)) / (c2 n^{1/2 + 1.538 log 2 / log log n}) at n = e^L."""
    ll = math.log(L)
    return math.log(c1) + L - math.log(_phi_lower_factor(L)) - math.log(c2) - L * (0.5 + TAU_EXPONENT / ll)


@dataclass(frozen=True)
class Threshold:
    analytic: int
    refined: int
    analytic_log: float
    refined_exponent: int


def sufficient_threshold(Q: QuadForm, force: bool = False) -> Threshold:
    """N0 with theorem1_rhs(Q, n) > 0 for every n >= N0.

    The analytic N0 comes from phi(n) > n / (e^gamma log log n + 3 / log log n)
    and tau(n) <= n^{1.538 log 2 / log log n}.  It is then lowered to 2^K, where
    every dyadic block [2^k, 2^{k+1}) with k >= K is certified with the exact
    record count M(2^{k+1}) in place of tau.
    """
    c1, c2 = _theorem1_coeffs(Q, force)
    # the margin is increasing in L once log L exceeds ~1.5; start the search there
    lo, hi = 20.0, 40.0
    while _analytic_margin(hi, c1, c2) <= 0:
        hi *= 2
    for L in np.linspace(hi, 4 * hi, 64):
        if _analytic_margin(L, c1, c2) <= 0:
            raise ArgumentError("analytic margin is not monotone past the crossing")
    while _analytic_margin(lo, c1, c2) > 0:
        lo /= 2
        if lo < 3.0:
            break
    for _ in range(200):
        mid = (lo + hi) / 2
        if _analytic_margin(mid, c1, c2) > 0:
            hi = mid
        else:
            lo = mid
    analytic_log = hi
    analytic = math.ceil(math.exp(hi)) if hi < 700 else None
    if analytic is None:
        raise ArgumentError("threshold exceeds double range")
    # dyadic refinement: blocks are certified downward from the analytic bound
    top = analytic.bit_length()
    K = top
    for k in range(top - 1, 1, -1):
        if k + 1 > 128:
            break
        lo_n = 2**k
        f = _phi_lower_factor(math.log(2 ** (k + 1)))
        phi_low = c1 * lo_n / f
        tau_high = c2 * max_tau(2 ** (k + 1))[0] * math.sqrt(2 ** (k + 1))
        if phi_low > tau_high * (1 + SLOP):
            K = k
        else:
            break
    refined = min(analytic, 2**K)
    return Threshold(analytic, refined, analytic_log, K)


def theorem1_rhs_lower(Q: QuadForm, n: int, force: bool = False) -> float:
    """A lower bound for theorem1_rhs(Q, n) that needs no factorization of n (n >= 16)."""
    c1, c2 = _theorem1_coeffs(Q, force)
    f = _phi_lower_factor(math.log(n))
    return c1 * n / f - c2 * max_tau(n)[0] * math.sqrt(n)


def threshold_spot_check(Q: QuadForm, N0: int, count: int = 1000, force: bool = False) -> float:
    """Smallest lower bound for theorem1_rhs over N0 <= n <= N0 + count.

    n is far beyond the factoring range, so phi(n) and tau(n) are replaced by
    n / f(n) and the single record count M(N0 + count).
    """
    if N0 < 16 or count < 0:
        raise ArgumentError("need N0 >= 16 and count >= 0")
    c1, c2 = _theorem1_coeffs(Q, force)
    M = max_tau(N0 + count)[0]
    return min(c1 * n / _phi_lower_factor(math.log(n)) - c2 * M * math.sqrt(n) for n in range(N0, N0 + count + 1))


# -- the Petersson norm --------------------------------------------------------------

def _eis_star_coeff_bound(p: int) -> float:
    """a_E*(n) <= (4 pi^4 / (3 p^{3/2})) sigma(n)."""
    return 4.0 * math.pi**4 / (3.0 * p**1.5)


def _lattice_count_bound(a: tuple[Fraction, ...], p: int):
    """Rbar(t) >= #{x : Q*(x) <= t} = prod (4 sqrt(t a_i / p) + 1), with its derivative."""
    af = [float(x) / p for x in a]

    def value(t: float) -> float:
        return math.prod(4.0 * math.sqrt(t * c) + 1.0 for c in af)

    def deriv(t: float) -> float:
        facs = [4.0 * math.sqrt(t * c) + 1.0 for c in af]
        ders = [2.0 * math.sqrt(c / t) for c in af]
        total = 0.0
        for i in range(len(af)):
            total += ders[i] * math.prod(facs[j] for j in range(len(af)) if j != i)
        return total

    return value, deriv


@dataclass(frozen=True)
class PeterssonEstimate:
    p: int
    n_trunc: int
    head: float
    tail_r: float
    tail_e: float
    interval: Interval
    cusp_head_r: float = field(default=0.0)
    eis_head: float = field(default=0.0)


def _tail_weight(p: int):
    """w(t) >= (p/(p+1)) 2^{omega} * 2 / t * sum_d psi(d sqrt(t/p)) for t >= p/4."""
    c = p / (p + 1) * 2.0 * 2.0 * 9.0

    def w(t: float) -> float:
        x = math.sqrt(t / p)
        return c * x**1.5 * math.exp(-4.0 * math.pi * x) / t

    return w


def petersson_estimate(Q: QuadForm, n_trunc: int | None = None) -> PeterssonEstimate:
    p = _prime_disc(Q)
    N = 50 * p if n_trunc is None else int(n_trunc)
    if N < 4 * p:
        raise ArgumentError(f"N_trunc must be at least 4p = {4 * p}")
    rs, aEs, aCs = dual_cusp_coeffs(Q, N)
    n = np.arange(1, N + 1)
    weights = psi_sum_many(np.sqrt(n / p))
    mult = np.where(n % p == 0, 2.0, 1.0)
    base = (p / (p + 1)) * mult * weights / n
    aC = np.array([float(x) for x in aCs[1:]])
    aE = np.array([float(x) for x in aEs[1:]])
    r = rs[1:].astype(float)
    head = math.fsum((base * aC * aC).tolist())
    cusp_head_r = math.fsum((base * 2 * r * r).tolist())
    eis_head = math.fsum((base * 2 * aE * aE).tolist())

    # tail over n > N with |a_C*|^2 <= 2 r^2 + 2 a_E*^2
    w = _tail_weight(p)
    Rbar, dRbar = _lattice_count_bound(jacobi_decompose(Q).a, p)

    # r(n)^2 <= Rbar(n) r(n); Abel summation against g = w Rbar, which decreases
    # for t >= 4p because (log g)' <= 1.75/t - 2 pi / sqrt(t p) < 0 there
    # sum_{n>N} g(n) r(n) <= int_N^inf Rbar (-g') = Rbar(N) g(N) + int_N^inf Rbar' g
    g_int, g_err = integrate.quad(lambda t: dRbar(t) * w(t) * Rbar(t), N, np.inf, limit=200)
    tail_r = Rbar(N) * w(N) * Rbar(N) + g_int + abs(g_err)

    # 2 a_E*^2 <= 2 K^2 sigma(n)^2 <= 2 K^2 n^2 (1 + log n)^2; h is decreasing past N
    K = _eis_star_coeff_bound(p)

    def h(t: float) -> float:
        return w(t) * K * K * (t * (1.0 + math.log(t))) ** 2

    e_int, e_err = integrate.quad(h, N, np.inf, limit=200)
    tail_e = h(N) + e_int + abs(e_err)

    lo = head * (1 - SLOP)
    hi = (head + tail_r + tail_e) * (1 + SLOP)
    return PeterssonEstimate(p, N, head, tail_r, tail_e, Interval(lo, hi), cusp_head_r, eis_head)


def petersson_norm_estimate(Q: QuadForm, n_trunc: int | None = None) -> Interval:
    """An interval containing <C, C>; the default truncation is 50p."""
    return petersson_estimate(Q, n_trunc).interval


def eisenstein_part_bound(p: int) -> float:
    return (337.26 * math.log(p + 2) + 206.64) / p


def cusp_part_bound(Q: QuadForm) -> float:
    p = _prime_disc(Q)
    return 1.0 / min_nonzero(dual(Q)) + CUSP_PART_CONSTANT * m_value(p) / p**0.25


# -- sums of r_{Q*} -----------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    x: int
    lhs: float
    rhs: float

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


@dataclass(frozen=True)
class CheckReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def worst(self) -> dict[str, Check]:
        """Per inequality, the instance with the smallest relative margin."""
        out: dict[str, Check] = {}
        for c in self.checks:
            rel = c.margin / abs(c.rhs) if c.rhs else c.margin
            cur = out.get(c.name)
            if cur is None or rel < (cur.margin / abs(cur.rhs) if cur.rhs else cur.margin):
                out[c.name] = c
        return out


def sumbound_poly(x: float, p: int) -> float:
    return (
        64 * x**2 * p**-1.5
        + 75.52 * x**1.5 / p
        + 30.49 * x / math.sqrt(p)
        + 8.11 * math.sqrt(x)
        + 1
    )


def rqstar_sum_checks(Q: QuadForm, X: int, force: bool = False, pointwise: bool = True) -> CheckReport:
    """Check the r_{Q*} partial-sum bounds for 1 <= x <= X and the pointwise bounds for n <= X.

    Partial sums include the zero vector, as the lattice-point bounds they come from do.
    """
    p = _prime_disc(Q)
    _require(p, SUM_LEMMA_MIN_P, force)
    rs = representation_counts(dual(Q), X)
    cum = np.cumsum(rs)
    checks: list[Check] = []
    for x in range(1, X + 1):
        s = float(cum[x])
        checks.append(Check("sumbound", x, s, sumbound_poly(x, p)))
        if x <= p:
            checks.append(Check("sumcor_small", x, s, 179.12 * math.sqrt(x)))
        if x >= p:
            checks.append(Check("sumcor_large", x, s, 178.37 * x * x * p**-1.5))
    if pointwise:
        dec = jacobi_decompose(Q)
        a_star = sorted((float(a) for a in dec.a_star), reverse=True)
        a1s, a2s, a4s = a_star[0], a_star[1], a_star[3]
        for n in range(1, X + 1):
            r = float(rs[n])
            M = max_tau_scaled(CUTOFF_COEF * n, p, POINTWISE_EXP)
            box = 2.0 * (2.0 * math.sqrt(n / a1s) + 1.0) * (2.0 * math.sqrt(n / a2s) + 1.0)
            checks.append(Check("rQbound2", n, r, box * M))
            ind = 29.328 * n / p * a4s ** (1 / 3) + 10.764 * math.sqrt(n / p) * a4s**0.25 + 2.0
            checks.append(Check("individualbound", n, r, ind * M))
    return CheckReport(tuple(checks))


# -- excepted values ----------------------------------------------------------------

@dataclass(frozen=True)
class ExceptionsReport:
    N: int
    excepted: tuple[int, ...]
    total: int
    p_five_halves: float
    p_cubed_over_min2: float

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "excepted": list(self.excepted),
            "sum": self.total,
            "p_5_2": self.p_five_halves,
            "p3_over_minqstar2": self.p_cubed_over_min2,
        }


def exceptions_sum_report(Q: QuadForm, N: int) -> ExceptionsReport:
    if N < 1:
        raise ArgumentError("N must be positive")
    r = representation_counts(Q, N)
    exc = tuple(int(n) for n in np.flatnonzero(r[1:] == 0) + 1)
    p = Q.disc
    mq = min_nonzero(dual(Q))
    return ExceptionsReport(N, exc, sum(exc), p**2.5, p**3 / mq**2)
