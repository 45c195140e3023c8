"""Modified Bessel functions K0, K1 and the weight function psi.

K_nu is summed from its power series for x <= 2.  Above that it is computed
from K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt with the trapezoidal
rule; the integrand is analytic in a strip, so the rule converges
geometrically and a step of 0.1 is already exact to double precision.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ArgumentError

EULER_GAMMA = 0.57721566490153286061
SERIES_CUTOFF = 2.0
_STEP = 0.1

# psi(x) -> -3/(2 pi^2) as x -> 0
PSI_ZERO = -3.0 / (2.0 * math.pi**2)
PSI_SUM_LIMIT = 3.0 / (4.0 * math.pi**2)


def _series(order: int, x: np.ndarray) -> np.ndarray:
    y = x * x / 4.0
    log_half = np.log(x / 2.0)
    out = np.zeros_like(x)
    if order == 0:
        # K0 = -(log(x/2) + gamma) I0 + sum y^k / (k!)^2 H_k
        term = np.ones_like(x)
        i0 = np.ones_like(x)
        acc = np.zeros_like(x)
        harmonic = 0.0
        for k in range(1, 40):
            term = term * y / (k * k)
            harmonic += 1.0 / k
            i0 += term
            acc += term * harmonic
        out = -(log_half + EULER_GAMMA) * i0 + acc
    else:
        # K1 = 1/x + log(x/2) I1 - (x/4) sum (digamma(k+1) + digamma(k+2)) y^k / (k! (k+1)!)
        term = np.ones_like(x)
        i1 = np.ones_like(x)
        acc = (2.0 * -EULER_GAMMA + 1.0) * term
        h_k = 0.0
        for k in range(1, 40):
            term = term * y / (k * (k + 1))
            h_k += 1.0 / k
            i1 += term
            acc += term * (2.0 * (h_k - EULER_GAMMA) + 1.0 / (k + 1))
        i1 *= x / 2.0
        out = 1.0 / x + log_half * i1 - (x / 4.0) * acc
    return out


def _scaled_quadrature(order: int, x: np.ndarray) -> np.ndarray:
    """exp(x) K_order(x) by the trapezoidal rule, for x >= 2."""
    # exp(-x (cosh t - 1)) < 1e-20 once x (cosh t - 1) > 46
    t_max = math.acosh(1.0 + 46.0 / float(np.min(x)))
    t = np.arange(0.0, t_max + _STEP, _STEP)
    w = np.full_like(t, _STEP)
    w[0] = _STEP / 2.0
    weights = w * np.cosh(order * t)
    return np.exp(-np.outer(x, np.cosh(t) - 1.0)) @ weights


def bessel_k(order: int, x):
    """K_0(x) or K_1(x) for x > 0; accepts scalars or arrays."""
    if order not in (0, 1):
        raise ArgumentError("only orders 0 and 1 are supported")
    arr = np.asarray(x, dtype=np.float64)
    if np.any(~(arr > 0)):
        raise ArgumentError("bessel_k needs x > 0")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    small = flat <= SERIES_CUTOFF
    if small.any():
        out[small] = _series(order, flat[small])
    if (~small).any():
        big = flat[~small]
        out[~small] = _scaled_quadrature(order, big) * np.exp(-big)
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def psi(x):
    """-(6/pi) x K1(4 pi x) + 24 x^2 K0(4 pi x), extended continuously to x = 0."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0):
        raise ArgumentError("psi is evaluated at x >= 0")
    flat = np.atleast_1d(arr).ravel()
    out = np.full_like(flat, PSI_ZERO)
    pos = flat > 0
    if pos.any():
        xp = flat[pos]
        z = 4.0 * math.pi * xp
        out[pos] = -(6.0 / math.pi) * xp * bessel_k(1, z) + 24.0 * xp * xp * bessel_k(0, z)
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def psi_bound(x: float) -> float:
    """6 sqrt(2) x^{3/2} e^{-4 pi x}, an upper bound for psi(x)."""
    return 6.0 * math.sqrt(2.0) * x**1.5 * math.exp(-4.0 * math.pi * x)


def _terms_needed(x: float, tol: float) -> int:
    """Smallest D with sum_{d > D} psi_bound(d x) < tol.

    For d past 3/(8 pi x) the ratio of consecutive bounds is at most
    r = ((D+1)/D)^{3/2} e^{-4 pi x} < 1, so the tail is <= bound(D x) r / (1 - r).
    """
    d = max(1, math.ceil(3.0 / (8.0 * math.pi * x)))
    while True:
        r = ((d + 1) / d) ** 1.5 * math.exp(-4.0 * math.pi * x)
        if r < 1.0 and psi_bound(d * x) * r / (1.0 - r) < tol:
            return d
        d = max(d + 1, int(d * 1.25))


def psi_sum(x: float, tol: float = 1e-17) -> float:
    """sum_{d >= 1} psi(d x), truncated once the rigorous tail bound drops below tol."""
    if not x > 0:
        raise ArgumentError("psi_sum needs x > 0")
    if not tol > 0:
        raise ArgumentError("tol must be positive")
    D = _terms_needed(float(x), tol)
    terms = psi(np.arange(1, D + 1, dtype=np.float64) * x)
    return math.fsum(terms.tolist())


def psi_sum_many(xs, tol: float = 1e-17) -> np.ndarray:
    return np.array([psi_sum(float(x), tol) for x in np.asarray(xs, dtype=np.float64)])
