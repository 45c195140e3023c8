"""Independent reference implementations used to freeze test values.

Nothing here imports quatform: each oracle is the slow, obvious algorithm.
"""

import itertools
import math

import mpmath


def form_value(A, x):
    n = len(A)
    return sum(A[i][j] * x[i] * x[j] for i in range(n) for j in range(n)) // 2


def brute_counts(A, N, box):
    """r(n) for n <= N by scanning |x_i| <= box."""
    out = [0] * (N + 1)
    rng = range(-box, box + 1)
    for x in itertools.product(rng, repeat=len(A)):
        v = form_value(A, x)
        if v <= N:
            out[v] += 1
    return out


def box_for(A, N):
    """A box guaranteed to contain every x with Q(x) <= N: |x_i| <= sqrt(N * (2 A^{-1})_{ii})."""
    M = mpmath.matrix([[mpmath.mpf(v) / 2 for v in row] for row in A])
    inv = M**-1
    return max(int(mpmath.floor(mpmath.sqrt(N * inv[i, i]))) + 1 for i in range(len(A)))


def brute_local_types(A, q, v, n):
    """(good, zero, bad) counts over all vectors mod q^v, by definition."""
    M = q**v
    d = len(A)
    good = zero = bad = 0
    for x in itertools.product(range(M), repeat=d):
        if form_value(A, x) % M != n % M:
            continue
        if all(c % q == 0 for c in x):
            zero += 1
        elif any(sum(A[i][j] * x[j] for j in range(d)) % q for i in range(d)):
            good += 1
        else:
            bad += 1
    return good, zero, bad


def tau(n):
    return sum(1 for d in range(1, n + 1) if n % d == 0)


def max_tau_scan(X):
    best, arg = 0, 1
    for m in range(1, X + 1):
        t = tau(m)
        if t > best:
            best, arg = t, m
    return best, arg


def bessel_k_series(order, x, dps=40):
    """K_0 / K_1 from the ascending series, summed with enough guard digits for x <= 30."""
    with mpmath.workdps(dps + 30):
        x = mpmath.mpf(x)
        y = x * x / 4
        lg = mpmath.log(x / 2)
        g = mpmath.euler
        if order == 0:
            term, i0, acc, h = mpmath.mpf(1), mpmath.mpf(1), mpmath.mpf(0), mpmath.mpf(0)
            k = 0
            while True:
                k += 1
                term *= y / (k * k)
                h += mpmath.mpf(1) / k
                i0 += term
                acc += term * h
                if term * (1 + h) < mpmath.mpf(10) ** (-(dps + 25)) and k > y:
                    break
            val = -(lg + g) * i0 + acc
        else:
            # K1 = 1/x + ln(x/2) I1 - (x/4) sum (psi(k+1) + psi(k+2)) y^k / (k!(k+1)!)
            term = mpmath.mpf(1)
            i1 = mpmath.mpf(1)
            acc = mpmath.digamma(1) + mpmath.digamma(2)
            k = 0
            while True:
                k += 1
                term *= y / (k * (k + 1))
                i1 += term
                acc += term * (mpmath.digamma(k + 1) + mpmath.digamma(k + 2))
                if term * (abs(acc) + 1) < mpmath.mpf(10) ** (-(dps + 25)) and k > y:
                    break
            val = 1 / x + lg * i1 * x / 2 - x / 4 * acc
        return mpmath.mpf(val)


def gen_bernoulli2(p):
    """B_{2, chi_p} = p * sum_{a=1}^{p} chi(a) B_2(a/p), B_2(t) = t^2 - t + 1/6."""
    from fractions import Fraction

    def leg(a):
        a %= p
        if a == 0:
            return 0
        return 1 if pow(a, (p - 1) // 2, p) == 1 else -1

    s = sum(leg(a) * (Fraction(a, p) ** 2 - Fraction(a, p) + Fraction(1, 6)) for a in range(1, p + 1))
    return p * s
