from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import box_for, brute_counts
from strategies import prime_disc_forms, small_forms
from quatform.errors import ArgumentError
from quatform.family import family_form
from quatform.qform import dual, from_csv, from_gram, from_json, jacobi_decompose, level, min_nonzero

Q13 = [[2, 1, 1, 1], [1, 2, 1, 1], [1, 1, 2, 1], [1, 1, 1, 4]]
TWO_I = (2 * np.eye(4, dtype=int)).tolist()


def test_from_gram_examples():
    assert from_gram(Q13).disc == 13
    I2 = from_gram(TWO_I)
    assert (I2.disc, I2.level) == (16, 4)


@pytest.mark.parametrize(
    "bad",
    [
        [[2, 1, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]],
        [[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]],
        [[2, 3, 0, 0], [3, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]],
        [[2, 0], [0, 2]],
    ],
)
def test_from_gram_rejects(bad):
    with pytest.raises(ArgumentError):
        from_gram(bad)


def test_level_examples():
    Q = from_gram(Q13)
    assert level(Q) == 13
    assert level(from_gram(TWO_I)) == 4
    assert level(dual(Q)) == 13


def test_dual_examples():
    Q = from_gram(Q13)
    D = dual(Q)
    assert D.disc == 13**3
    assert all(D.gram[i][i] % 2 == 0 for i in range(4))
    assert dual(D) == Q


def test_serialization_roundtrip():
    Q = from_gram(Q13)
    assert from_json(Q.to_json()) == Q
    assert from_csv(Q.to_csv()) == Q
    assert from_json("[[2,1,1,1],[1,2,1,1],[1,1,2,1],[1,1,1,4]]") == Q


def test_jacobi_examples():
    d = jacobi_decompose(from_gram(TWO_I))
    assert d.a == (1, 1, 1, 1)
    assert all(d.m[i][j] == 0 for i in range(4) for j in range(4) if i != j)
    d13 = jacobi_decompose(from_gram(Q13))
    assert d13.a[0] == 1 == min_nonzero(from_gram(Q13))


def test_family_reduces_to_known_diagonal():
    for p in (5, 13, 101, 229):
        d = jacobi_decompose(family_form(p).form)
        assert d.a == (1, Fraction(3, 4), Fraction(2, 3), Fraction(p, 8))
        assert d.a_star == tuple(Fraction(p, 4) / a for a in d.a)


def test_min_nonzero_examples():
    assert min_nonzero(from_gram(TWO_I)) == 1
    assert min_nonzero(from_gram(Q13)) == 1
    # p = 101: dual minimum is the last dual coefficient, below 3/4 sqrt(p)
    F = family_form(101).form
    d = jacobi_decompose(F)
    m = min_nonzero(dual(F))
    assert m == 2 == min(d.a_star)
    assert m < Fraction(3, 4) * 101**0.5


@given(prime_disc_forms())
def test_structure_invariants(Q):
    d = jacobi_decompose(Q)
    assert d.a[0] * d.a[1] * d.a[2] * d.a[3] == Fraction(Q.disc, 16)
    assert all(d.a[i + 1] / d.a[i] >= Fraction(3, 4) for i in range(3))
    assert all(abs(d.m[i][j]) <= Fraction(1, 2) for i in range(4) for j in range(i + 1, 4))
    assert d.expand() == [[Fraction(x, 2) for x in row] for row in d.reduced_gram]
    assert d.a[0] == min_nonzero(Q)


@given(prime_disc_forms())
def test_dual_decomposition_products(Q):
    d = jacobi_decompose(Q)
    p = Q.disc
    assert all(a * s == Fraction(p, 4) for a, s in zip(d.a, d.a_star))
    assert level(dual(Q)) == level(Q) == p


@given(small_forms())
def test_min_nonzero_against_brute(Q):
    r = brute_counts(Q.gram, 6, box_for(Q.gram, 6))
    first = next((n for n in range(1, 7) if r[n]), None)
    m = min_nonzero(Q)
    if first is not None:
        assert m == first
    else:
        assert m > 6


@given(small_forms(), st.lists(st.integers(-4, 4), min_size=4, max_size=4))
def test_value_matches_matrix(Q, x):
    v = np.array(x)
    assert Q(x) == int(v @ Q.matrix @ v) // 2
