from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import gen_bernoulli2, max_tau_scan, tau
from quatform.errors import ArgumentError
from quatform.exactmath import (
    CharacterMod,
    divisor_tables,
    factorize,
    floor_monomial,
    is_prime,
    iroot,
    kronecker,
    l_value_minus1,
    max_tau,
    max_tau_scaled,
    multiplicative_bundle,
    primes_up_to,
)


def test_kronecker_examples():
    assert kronecker(5, 2) == -1
    assert kronecker(13, 13) == 0
    assert kronecker(13, 1) == 1


@given(st.sampled_from([3, 5, 7, 13, 29, 101, 229]), st.integers(-500, 500))
def test_kronecker_matches_squares(p, n):
    squares = {(k * k) % p for k in range(1, p)}
    expected = 0 if n % p == 0 else (1 if n % p in squares else -1)
    assert kronecker(p, n) == expected == CharacterMod(p)(n)


def test_bundle_examples():
    assert multiplicative_bundle(1) == (1, 1, 1, 1, 0)
    assert multiplicative_bundle(12) == (4, 6, 28, 0, 2)
    assert multiplicative_bundle(101) == (100, 2, 102, -1, 1)


@given(st.integers(1, 3000))
def test_bundle_by_definition(n):
    mb = multiplicative_bundle(n)
    from math import gcd

    assert mb.phi == sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)
    assert mb.tau == tau(n)
    assert mb.sigma == sum(d for d in range(1, n + 1) if n % d == 0)


def test_divisor_tables_agree_with_bundle():
    phi, tau_, sigma = divisor_tables(400)
    for n in range(1, 401):
        mb = multiplicative_bundle(n)
        assert (phi[n], tau_[n], sigma[n]) == (mb.phi, mb.tau, mb.sigma)


@given(st.integers(2, 10**12))
def test_factorize_roundtrip(n):
    f = factorize(n)
    prod = 1
    for p, e in f.items():
        assert is_prime(p)
        prod *= p**e
    assert prod == n


def test_factorize_refuses_huge():
    with pytest.raises(ArgumentError):
        factorize(2**64 + 1)


def test_primes_up_to():
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert is_prime(2**61 - 1) and not is_prime(2**61 + 1)


def test_max_tau_examples():
    assert max_tau(1) == (1, 1)
    assert max_tau(48) == (10, 48)


@pytest.mark.parametrize("X", [2, 10, 59, 60, 100, 359, 360, 1000, 5039, 5040])
def test_max_tau_matches_scan(X):
    assert max_tau(X) == max_tau_scan(X)


def test_max_tau_record_cutoff():
    X = floor_monomial(Fraction(2509, 100), {Fraction(101): Fraction(35, 6)})
    assert max_tau(X) == (10752, 9316358251200)


@given(st.integers(1, 2000))
def test_max_tau_monotone_and_witnessed(X):
    M, w = max_tau(X)
    assert w <= X and tau(w) == M
    assert max_tau(X + 1)[0] >= M


def test_max_tau_scaled_matches_floor():
    X = floor_monomial(Fraction(2509, 100) * 7, {Fraction(101): Fraction(29, 6)})
    assert max_tau_scaled(Fraction(2509, 100) * 7, 101, Fraction(29, 6)) == max_tau(X)[0]


@given(st.integers(0, 10**40), st.integers(1, 7))
def test_iroot(n, k):
    r = iroot(n, k)
    assert r**k <= n < (r + 1) ** k


@given(
    st.fractions(min_value=Fraction(1, 100), max_value=100, max_denominator=100),
    st.integers(2, 300),
    st.fractions(min_value=0, max_value=7, max_denominator=12),
)
def test_floor_monomial_brackets(c, b, e):
    f = floor_monomial(c, {Fraction(b): e})
    # (f / c)^den <= b^num < ((f+1) / c)^den, checked exactly
    num, den = e.numerator, e.denominator
    assert (Fraction(f) / c) ** den <= Fraction(b) ** num < (Fraction(f + 1) / c) ** den


def test_l_value_examples():
    assert l_value_minus1(5) == Fraction(-2, 5)


@pytest.mark.parametrize("p", [5, 13, 17, 29, 37, 41, 53, 101, 229, 541])
def test_l_value_against_bernoulli(p):
    L = l_value_minus1(p)
    assert L == -gen_bernoulli2(p) / 2
    assert L < 0
    # |L| <= p^{3/2} / 12, compared after squaring
    assert L * L <= Fraction(p**3, 144)


def test_l_value_rejects():
    with pytest.raises(ArgumentError):
        l_value_minus1(7)
    with pytest.raises(ArgumentError):
        l_value_minus1(15)
