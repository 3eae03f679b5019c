from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abelgkp.concat import StabilizerSpec, concatenate, stabilizer_of_extension, validate_stabilizer
from abelgkp.errors import InconsistentPhases, NotCommuting, NotPauli
from abelgkp.gallery import gallery_code
from abelgkp.gkpcode import GkpCode, PauliElement, Semicharacter, allowed_phases
from abelgkp.symplattice import lattice_from_basis, lattice_from_period_matrix, member

TWO_Z2 = GkpCode.from_lattice(lattice_from_basis(2 * np.eye(2)))
HALF = Fraction(1, 2)


def test_two_z2_has_type_four():
    assert TWO_Z2.divisors == (4,)


def test_single_generator_extension():
    rep = concatenate(TWO_Z2, StabilizerSpec([PauliElement((2, 0), 0)]))
    assert rep.new_type.divisors == (2,)
    assert (rep.index, rep.kernel_divisors) == (2, (2,))
    assert rep.old_type.divisors == (4,)
    assert np.allclose(np.sort(np.abs(rep.new_code.lattice.basis).sum(axis=0)), [1.0, 2.0])


@pytest.mark.parametrize("alpha", [0, HALF])
def test_two_generator_extension(alpha):
    stab = StabilizerSpec([PauliElement((2, 0), 0), PauliElement((0, 2), alpha)])
    rep = concatenate(TWO_Z2, stab)
    assert rep.new_type.divisors == (1,)
    assert (rep.index, rep.kernel_divisors) == (4, (2, 2))


@pytest.mark.parametrize("alpha", [Fraction(1, 4), Fraction(3, 4)])
def test_inconsistent_phases_rejected(alpha):
    stab = StabilizerSpec([PauliElement((2, 0), 0), PauliElement((0, 2), alpha)])
    with pytest.raises(InconsistentPhases):
        concatenate(TWO_Z2, stab)


def test_phase_clashing_with_semicharacter_rejected():
    code = GkpCode.from_lattice(TWO_Z2.lattice, Semicharacter((HALF, Fraction(0))))
    with pytest.raises(InconsistentPhases):
        concatenate(code, StabilizerSpec([PauliElement((2, 0), 0)]))


def test_empty_stabilizer_is_trivial_extension():
    rep = concatenate(TWO_Z2, StabilizerSpec([]))
    assert (rep.index, rep.kernel_divisors, rep.new_type.divisors) == (1, (), (4,))


def test_noncommuting_and_non_pauli_rejected():
    code = gallery_code("square-d2")
    with pytest.raises(NotCommuting):
        concatenate(code, StabilizerSpec([PauliElement((1, 0)), PauliElement((0, 1))]))
    with pytest.raises(NotPauli):
        validate_stabilizer(code, StabilizerSpec([PauliElement((1, 0), Fraction(1, 8))]))
    with pytest.raises(NotPauli):
        validate_stabilizer(code, StabilizerSpec([PauliElement((1, 0, 0))]))


CODES = [
    TWO_Z2,
    GkpCode.from_lattice(lattice_from_period_matrix(np.diag([1j, 1.4j]), [2, 4])),
    GkpCode.from_lattice(lattice_from_basis(np.sqrt(6) * np.eye(2)), Semicharacter((Fraction(1, 3), HALF))),
    GkpCode.from_lattice(lattice_from_period_matrix(np.array([[1.1j, 0.2], [0.2, 0.9j]]), [2, 2]),
                         Semicharacter((0, HALF, Fraction(1, 4), 0))),
]


def random_stabilizer(code, rng, tries=20):
    dd = code.dual_divisors
    gens = []
    for _ in range(int(rng.integers(1, 4))):
        for _ in range(tries):
            mu = tuple(int(rng.integers(0, d)) for d in dd)
            if all(code.E_dual(mu, g.mu).denominator == 1 for g in gens):
                phases = allowed_phases(code, mu)
                gens.append(PauliElement(mu, phases[int(rng.integers(len(phases)))]))
                break
    return StabilizerSpec(gens)


def valid_reports(count, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        code = CODES[int(rng.integers(len(CODES)))]
        stab = random_stabilizer(code, rng)
        try:
            out.append((code, stab, concatenate(code, stab)))
        except InconsistentPhases:
            continue
    return out


def test_determinant_bookkeeping_on_random_stabilizers():
    for code, stab, rep in valid_reports(50, 2024):
        assert rep.new_type.pfaffian * rep.index == rep.old_type.pfaffian
        assert rep.new_code.lattice.covolume * rep.index == pytest.approx(code.lattice.covolume)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_extension_restricts_to_original_semicharacter(seed):
    code, stab, rep = valid_reports(1, seed)[0]
    new = rep.new_code
    for i in range(code.lattice.dim):
        coords = member(new.lattice, code.lattice.basis[:, i])
        assert coords is not None
        assert new.nu_turns(coords) == code.nu.base_phases[i]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_round_trip_through_stabilizer(seed):
    code, stab, rep = valid_reports(1, seed)[0]
    again = concatenate(code, stabilizer_of_extension(code, rep))
    assert again.dual_coords == rep.dual_coords
    assert again.new_code.nu.base_phases == rep.new_code.nu.base_phases
    assert again.index == rep.index
