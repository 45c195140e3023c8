import pytest
from hypothesis import given
from hypothesis import strategies as st

from quatform.errors import ArgumentError
from quatform.family import (
    construction_identity,
    diagonal_identity_holds,
    family_form,
    predicted_exceptions,
    ternary_construction,
    ternary_exceptions,
    ternary_mod32_classes,
    ternary_value,
    verify_family,
)
from quatform.theta import representation_counts


def test_family_form_examples():
    F13 = family_form(13)
    assert [F13.form.gram[i][i] for i in range(4)] == [2, 2, 2, 4] and F13.form.disc == 13
    F5 = family_form(5)
    assert [F5.form.gram[i][i] for i in range(4)] == [2, 2, 2, 2] and F5.form.disc == 5
    with pytest.raises(ArgumentError):
        family_form(17)
    with pytest.raises(ArgumentError):
        family_form(21)


@pytest.mark.parametrize("p", [5, 13, 29, 101, 229, 541, 1013])
def test_diagonal_identity(p):
    assert diagonal_identity_holds(family_form(p))


def test_predicted_examples():
    assert predicted_exceptions(101, 10**4) == []
    assert predicted_exceptions(229, 100) == [14]
    assert predicted_exceptions(1013, 200) == [14, 30, 46, 56, 62, 78, 94, 110, 120, 126]
    assert predicted_exceptions(541, 2000) == [14, 30, 46, 56, 62]


@pytest.mark.parametrize(
    "p, N, expected",
    [(13, 1000, ()), (229, 1000, (14,)), (541, 2000, (14, 30, 46, 56, 62))],
)
def test_verify_family_examples(p, N, expected):
    es, ok = verify_family(p, N)
    assert ok and es.computed == es.predicted == expected


def test_ternary_exceptions():
    assert ternary_exceptions(100) == [14, 30, 46, 56, 62, 78, 94]
    assert ternary_mod32_classes() == [14, 30]
    assert 9 not in ternary_exceptions(100)


def test_ternary_every_exception_is_obstructed():
    # each zero of r_T up to 2000 is 4^k (16 l + 14)
    for n in ternary_exceptions(2000):
        while n % 4 == 0:
            n //= 4
        assert n % 16 == 14


def test_ternary_construction_examples():
    assert ternary_construction(9) == (0, -1, 0)
    x, y, z = ternary_construction(33)
    assert (4 * z + 1) ** 2 + 2 * (3 * y + z + 1) ** 2 + 6 * (2 * x + y + z + 1) ** 2 == 33
    with pytest.raises(ArgumentError):
        ternary_construction(10)


@given(st.integers(0, 2000), st.sampled_from([5, 13, 101, 229]))
def test_construction_identity(m, p):
    triple = ternary_construction(24 * m + 9)
    assert ternary_value(*triple) == m
    assert construction_identity(p, triple)


@given(st.sampled_from([13, 29, 37, 53, 61]), st.integers(1, 600))
def test_family_represents_unless_predicted(p, n):
    r = representation_counts(family_form(p).form, n)
    assert (r[n] == 0) == (n in predicted_exceptions(p, n))
