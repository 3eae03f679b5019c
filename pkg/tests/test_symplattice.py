import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from abelgkp import intmat
from abelgkp.errors import NotSiegel, NotSymplecticallyIntegral, SingularBasis
from abelgkp.symplattice import (E, LatticeType, frobenius_basis, lattice_from_basis,
                                 lattice_from_period_matrix, member, standard_gram,
                                 symplectic_dual, symplectic_form, to_complex, to_real)

TYPES = [(2,), (3,), (1, 2), (2, 4), (2, 2, 2)]


def random_unimodular(rng, m, steps=12):
    w = intmat.identity(m)
    for _ in range(steps):
        i, j = rng.choice(m, 2, replace=False)
        q = int(rng.integers(-3, 4))
        for r in range(m):
            w[r][j] += q * w[r][i]
        if rng.random() < 0.3:
            for r in range(m):
                w[r][i], w[r][j] = w[r][j], w[r][i]
    return w


def conjugate(gram, w):
    return intmat.matmul(intmat.matmul(intmat.transpose(w), gram), w)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(TYPES), st.integers(0, 2 ** 32 - 1))
def test_frobenius_recovers_type(divs, seed):
    rng = np.random.default_rng(seed)
    g = conjugate(standard_gram(divs), random_unimodular(rng, 2 * len(divs)))
    sb = frobenius_basis(g)
    assert sb.type.divisors == divs
    assert abs(intmat.det(sb.u)) == 1
    assert conjugate(g, sb.u) == standard_gram(divs)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_frobenius_type_matches_smith_oracle(seed):
    rng = np.random.default_rng(seed)
    divs = TYPES[int(rng.integers(len(TYPES)))]
    g = conjugate(standard_gram(divs), random_unimodular(rng, 2 * len(divs)))
    snf = smith_normal_form(Matrix(g), domain=ZZ)
    inv = sorted(abs(int(snf[i, i])) for i in range(len(g)))
    # invariant factors of an alternating form come in equal pairs
    assert tuple(inv[::2]) == frobenius_basis(g).type.divisors


def test_frobenius_identity_on_standard_input():
    sb = frobenius_basis(standard_gram((2, 4)))
    assert sb.u == tuple(tuple(r) for r in intmat.identity(4))


def test_frobenius_rejects_bad_gram():
    with pytest.raises(ValueError):
        frobenius_basis([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        frobenius_basis([[0, 1, 0]])


def test_lattice_type_validation():
    t = LatticeType((2, 4))
    assert (t.n, t.pfaffian, t.exponent) == (2, 8, 4)
    assert LatticeType((1, 1)).is_trivial()
    with pytest.raises(ValueError):
        LatticeType((2, 3))
    with pytest.raises(ValueError):
        LatticeType((0,))


def test_form_conventions():
    j = symplectic_form(1)
    assert E([1, 0], [0, 1]) == 1.0
    assert np.array_equal(j, [[0, 1], [-1, 0]])
    u, v = np.array([0.3, -1.2, 0.7, 2.0]), np.array([1.1, 0.4, -0.5, 0.9])
    h = np.sum(to_complex(u) * np.conj(to_complex(v)))
    assert h.real == pytest.approx(u @ v)
    assert h.imag == pytest.approx(E(u, v))
    assert np.allclose(to_real(to_complex(u)), u)


def test_lattice_from_basis_gram():
    lat = lattice_from_basis(math.sqrt(2) * np.eye(2))
    assert lat.gram_E == ((0, 2), (-2, 0))
    assert lat.covolume == pytest.approx(2.0)
    assert member(lat, [math.sqrt(2), -math.sqrt(8)]) == (1, -2)
    assert member(lat, [0.5, 0]) is None


def test_lattice_from_basis_errors():
    with pytest.raises(ValueError):
        lattice_from_basis(np.eye(3))
    with pytest.raises(SingularBasis):
        lattice_from_basis([[1, 2], [2, 4]])
    with pytest.raises(NotSymplecticallyIntegral):
        lattice_from_basis(1.1 * np.eye(2))


def test_period_matrix_square_unit():
    lat = lattice_from_period_matrix([[1j]], [1])
    assert lat.gram_E == ((0, 1), (-1, 0))


def test_period_matrix_hexagonal():
    lat = lattice_from_period_matrix([[2 * cmath.exp(1j * math.pi / 3)]], [2])
    assert frobenius_basis(lat).type.divisors == (2,)
    a, b = lat.basis[:, 0], lat.basis[:, 1]
    norms = [np.linalg.norm(x) for x in (a, b, a - b)]
    assert norms == pytest.approx([norms[0]] * 3, rel=1e-12)
    assert norms[0] == pytest.approx(1.5196713713, rel=1e-9)


def test_period_matrix_two_modes():
    lat = lattice_from_period_matrix(np.array([[1.2j, 0.3], [0.3, 0.9j + 0.1]]), [1, 2])
    assert frobenius_basis(lat).type.divisors == (1, 2)


def test_period_matrix_rejects_non_siegel():
    with pytest.raises(NotSiegel):
        lattice_from_period_matrix([[-1j]], [1])
    with pytest.raises(NotSiegel):
        lattice_from_period_matrix([[1j, 0.2], [0.3, 1j]], [1, 1])


def test_symplectic_dual_pairs_integrally():
    lat = lattice_from_basis(np.array([[1.3, 0.41], [0.17, 0.82]]) * math.sqrt(3 / (1.3 * 0.82 - 0.41 * 0.17)))
    dual = symplectic_dual(lat)
    pair = dual.T @ symplectic_form(1) @ lat.basis
    assert np.allclose(pair, np.rint(pair), atol=1e-12)
    assert abs(np.linalg.det(dual)) == pytest.approx(lat.covolume / 9)
