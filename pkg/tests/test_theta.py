from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import box_for, brute_counts
from strategies import small_forms
from quatform import _kernels
from quatform.bounds import bound_report
from quatform.exactmath import divisor_tables, kronecker, l_value_minus1
from quatform.family import family_form, ternary_form
from quatform.qform import from_gram
from quatform.theta import (
    cusp_coeffs,
    dual_cusp_coeffs,
    eisenstein_coeffs,
    eisenstein_dual_coeffs,
    eisenstein_lower_bound,
    representation_counts,
    theta_block,
)


def Qp(p):
    return family_form(p).form


# r_{Q13}(n), n = 0..12, frozen from the brute-force oracle
R13 = [1, 12, 14, 48, 36, 56, 56, 84, 70, 156, 48, 140, 144]


def test_r13_frozen():
    assert representation_counts(Qp(13), 12).tolist() == R13


def test_r13_oracle():
    A = Qp(13).gram
    assert brute_counts(A, 12, box_for(A, 12)) == R13


def test_r229_fourteen():
    r = representation_counts(Qp(229), 30)
    assert r[14] == 0 and r[0] == 1


@given(small_forms(), st.integers(0, 10))
def test_counts_match_brute(Q, N):
    r = representation_counts(Q, N)
    assert r.tolist() == brute_counts(Q.gram, N, box_for(Q.gram, N))


def test_ternary_counts_match_brute():
    T = ternary_form()
    r = representation_counts(T, 40)
    assert r.tolist() == brute_counts(T.gram, 40, box_for(T.gram, 40))


def test_numpy_fallback_agrees(monkeypatch):
    fast = representation_counts(Qp(101), 300)
    monkeypatch.setenv("QUATFORM_NO_NUMBA", "1")
    assert not _kernels.numba_enabled()
    slow = representation_counts(Qp(101), 300)
    assert np.array_equal(fast, slow)


def test_eisenstein_examples():
    aE = eisenstein_coeffs(Qp(5), 10)
    assert aE[0] == 1 and aE[1] == 20
    for p in (5, 13, 101, 229):
        assert eisenstein_coeffs(Qp(p), 1)[1] == Fraction(-2 * (p - 1)) / l_value_minus1(p)


def test_p5_has_no_cusp_part():
    block = theta_block(Qp(5), 200)
    assert all(c == 0 for c in cusp_coeffs(block))
    assert cusp_coeffs(block)[0] == 0


def test_dual_eisenstein_examples():
    p = 101
    aEs = eisenstein_dual_coeffs(Qp(p), 300)
    _, _, sigma = divisor_tables(300)
    K = 4 * np.pi**4 / (3 * p**1.5)
    assert aEs[1] == 0
    for n in range(1, 301):
        if kronecker(p, n) == 1:
            assert aEs[n] == 0
        assert 0 <= aEs[n] <= K * sigma[n] * (1 + 1e-12)


def test_dual_cusp_split_is_consistent():
    rs, aEs, aCs = dual_cusp_coeffs(Qp(101), 200)
    assert all(int(rs[n]) == aEs[n] + aCs[n] for n in range(1, 201))


def test_cusp_coefficients_bounded():
    Q = Qp(101)
    C = bound_report(Q).C_Q_bound
    block = theta_block(Q, 1000)
    _, tau, _ = divisor_tables(1000)
    for n in range(1, 1001):
        assert abs(float(block.aC[n])) <= C * tau[n] * n**0.5


@pytest.mark.parametrize("p", [5, 13, 101])
def test_eisenstein_lower_bound_holds(p):
    aE = eisenstein_coeffs(Qp(p), 1000)
    for n in range(1, 1001):
        assert eisenstein_lower_bound(p, n).is_at_most(aE[n])
    lb1 = eisenstein_lower_bound(p, 1)
    assert lb1.num == 24 * (p - 1)
    assert eisenstein_lower_bound(p, p).num == (p - 1) * lb1.num


def test_theta_csv_header():
    text = theta_block(Qp(5), 3).to_csv().splitlines()
    assert text[0] == "n,r,aE_num,aE_den,aC_num,aC_den"
    assert text[1] == "0,1,1,1,0,1"


@pytest.mark.parametrize("p", [29, 101, 229])
def test_dual_cusp_vanishes_on_residues(p):
    rs, aEs, aCs = dual_cusp_coeffs(Qp(p), 500)
    assert aEs[0] == 1 == rs[0]
    for n in range(1, 501):
        if kronecker(p, n) == 1:
            assert aCs[n] == 0


def test_dual_cusp_at_multiples_of_p():
    # the vanishing at p | n does not hold with this Eisenstein normalization;
    # the Petersson estimate keeps these terms
    _, _, aCs = dual_cusp_coeffs(Qp(101), 404)
    assert all(aCs[n] != 0 for n in (101, 202, 303, 404))
    _, _, aC13 = dual_cusp_coeffs(Qp(13), 200)
    assert all(c == 0 for c in aC13)
