from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abelgkp.errors import NotInDual
from abelgkp.gallery import gallery_code
from abelgkp.gkpcode import (GkpCode, PauliElement, Semicharacter, allowed_phases, commutator,
                             frac1, heis_reduce, omega_standard, parse_turns, pauli_check,
                             pauli_from_vector, pauli_group, pauli_identity, pauli_inv,
                             pauli_mul, pauli_pow, quotient_group, semicharacter_eval, sp_k_check)
from abelgkp.symplattice import lattice_from_period_matrix


def type12_code():
    return GkpCode.from_lattice(lattice_from_period_matrix(np.diag([1j, 1.3j]), [1, 2]))


CODES = {
    "square-d2": lambda: gallery_code("square-d2"),
    "square-d3": lambda: gallery_code("square-d3"),
    "type-1-2": type12_code,
    "hex-d2-twisted": lambda: GkpCode.from_lattice(gallery_code("hex-d2").lattice,
                                                   Semicharacter((Fraction(1, 3), Fraction(3, 4)))),
}
_cache = {}


def code(name):
    if name not in _cache:
        _cache[name] = CODES[name]()
    return _cache[name]


def test_parse_turns():
    assert parse_turns("3/4") == Fraction(3, 4)
    assert parse_turns(" -1/2 ") == Fraction(1, 2)
    assert parse_turns(2) == 0
    with pytest.raises(ValueError):
        parse_turns("half")


def test_quotient_group_shape():
    q = quotient_group(code("type-1-2"))
    assert q.order == 4 and q.exponent == 2
    assert [q.index(r) for r in q.reps] == list(range(4))


@pytest.mark.parametrize("name,size", [("square-d2", 16), ("square-d3", 54), ("type-1-2", 16)])
def test_pauli_group_size(name, size):
    c = code(name)
    group = pauli_group(c)
    assert len(group) == size == 2 * c.exponent * c.order_K
    assert all(pauli_check(c, p) for p in group)
    assert len({(p.mu, p.alpha) for p in group}) == size


@pytest.mark.parametrize("name", ["square-d2", "square-d3", "type-1-2", "hex-d2-twisted"])
def test_powers_and_commutators(name):
    c = code(name)
    group = pauli_group(c)
    ident = pauli_identity(c)
    for p in group:
        assert pauli_pow(c, p, 2 * c.exponent) == ident
        assert pauli_mul(c, p, pauli_inv(c, p)) == ident
    reps = quotient_group(c).reps
    for x in reps:
        for y in reps:
            assert commutator(c, PauliElement(x), PauliElement(y)) == omega_standard(c.divisors, x, y)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(sorted(CODES)), st.data())
def test_pauli_multiplication_is_associative(name, data):
    c = code(name)
    group = pauli_group(c)
    p, q, r = (group[data.draw(st.integers(0, len(group) - 1))] for _ in range(3))
    assert pauli_mul(c, pauli_mul(c, p, q), r) == pauli_mul(c, p, pauli_mul(c, q, r))
    pq, qp = pauli_mul(c, p, q), pauli_mul(c, q, p)
    assert frac1(pq.alpha - qp.alpha) == commutator(c, p, q)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(CODES)), st.lists(st.integers(-4, 4), min_size=4, max_size=4),
       st.lists(st.integers(-4, 4), min_size=4, max_size=4))
def test_semicharacter_law(name, x, y):
    c = code(name)
    dim = c.lattice.dim
    x, y = x[:dim], y[:dim]
    e = sum(a * g * b for a, row in zip(x, c.lattice.gram_E) for g, b in zip(row, y))
    lhs = c.nu_turns([a + b for a, b in zip(x, y)])
    assert frac1(lhs - c.nu_turns(x) - c.nu_turns(y) - Fraction(e, 2)) == 0
    assert abs(semicharacter_eval(c, x) - np.exp(2j * np.pi * float(c.nu_turns(x)))) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(CODES)), st.data())
def test_stabilizers_act_trivially(name, data):
    c = code(name)
    group = pauli_group(c)
    p = group[data.draw(st.integers(0, len(group) - 1))]
    coords = data.draw(st.lists(st.integers(-3, 3), min_size=c.lattice.dim, max_size=c.lattice.dim))
    delta = [d * x for d, x in zip(c.dual_divisors, coords)]
    stab = heis_reduce(c, delta, -c.nu_turns(c.dual_to_lattice_coords(delta)))
    assert stab == pauli_identity(c)
    lifted = [a + b for a, b in zip(p.mu, delta)]
    # reduction is compatible with multiplication by the stabilizer
    assert heis_reduce(c, lifted, p.alpha - c.nu_turns(c.dual_to_lattice_coords(delta))
                       - c.E_dual(p.mu, delta) / 2) == p


def test_allowed_phases_standard_qubit():
    c = code("square-d2")
    assert allowed_phases(c, (1, 0)) == [Fraction(k, 4) for k in range(4)]
    assert not pauli_check(c, PauliElement((1, 0), Fraction(1, 8)))


def test_allowed_phases_follow_semicharacter():
    c = code("hex-d2-twisted")
    for mu in quotient_group(c).reps:
        for a in allowed_phases(c, mu):
            assert pauli_check(c, PauliElement(mu, a))


def test_pauli_from_vector():
    c = code("square-d2")
    p = pauli_from_vector(c, [np.sqrt(0.5), 0], "1/2")
    assert p == PauliElement((1, 0), Fraction(1, 2))
    with pytest.raises(NotInDual):
        pauli_from_vector(c, [0.3, 0])


def test_sp_k_check_qubit_and_qutrit():
    assert sp_k_check((2,), [[0, 1], [1, 0]])
    assert sp_k_check((2,), [[0, 1], [-1, 0]])
    assert sp_k_check((2,), [[1, 0], [1, 1]])
    assert not sp_k_check((3,), [[0, 1], [1, 0]])
    assert sp_k_check((3,), [[0, 2], [1, 0]])
    assert not sp_k_check((2,), [[1, 1], [1, 1]])


def test_sp_k_check_mixed_type():
    # for type (1,2) the first factor is trivial; identity on the second is symplectic
    ident = [[int(i == j) for j in range(4)] for i in range(4)]
    assert sp_k_check((1, 2), ident)
