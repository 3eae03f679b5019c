from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from abelgkp import intmat

small = st.integers(-9, 9)


def matrices(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@given(matrices(3, 4))
def test_hnf_is_column_equivalent(a):
    h, v, r = intmat.hnf_columns(a)
    assert intmat.matmul(a, v) == h
    assert abs(intmat.det(v)) == 1
    assert all(not any(h[i][c] for i in range(3)) for c in range(r, 4))


@given(matrices(3, 5))
def test_kernel_vectors_annihilate(a):
    for k in intmat.integer_kernel(a):
        assert intmat.matvec(a, k) == [0, 0, 0]
        assert any(k)


@settings(max_examples=60)
@given(matrices(4, 4))
def test_smith_matches_sympy(a):
    ours = intmat.smith_invariants(a)
    snf = smith_normal_form(Matrix(a), domain=ZZ)
    theirs = [abs(int(snf[i, i])) for i in range(4) if snf[i, i] != 0]
    assert ours == theirs


def test_inverse_and_det():
    a = [[2, 1], [7, 4]]
    assert intmat.det(a) == 1
    assert intmat.matmul(a, intmat.inverse(a)) == intmat.identity(2)
    assert intmat.inverse([[2, 0], [0, 4]])[1][1] == Fraction(1, 4)
    with pytest.raises(ZeroDivisionError):
        intmat.inverse([[1, 2], [2, 4]])


def test_lcm():
    assert intmat.lcm(4, 6) == 12
