"""Concatenation with a finite stabilizer group as a lattice extension
lattice < L_S < dual, with the semicharacter extended by the generator phases."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from . import intmat
from .errors import InconsistentPhases, NotCommuting, NotPauli
from .gkpcode import (GkpCode, PauliElement, Semicharacter, frac1, heis_product, heis_reduce,
                      pauli_check)
from .symplattice import LatticeType, lattice_from_basis


@dataclass(frozen=True)
class StabilizerSpec:
    generators: Tuple[PauliElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))


@dataclass(frozen=True, eq=False)
class IsogenyReport:
    new_code: GkpCode
    index: int
    kernel_divisors: Tuple[int, ...]
    old_type: LatticeType
    new_type: LatticeType
    dual_coords: Tuple[Tuple[int, ...], ...]  # new basis in old Frobenius dual coordinates


def _relation_phase(code: GkpCode, gens: Sequence[PauliElement], coeffs: Sequence[int]) -> Fraction:
    """Scalar of prod_j g_j^{c_j} when sum c_j mu_j lies in the lattice."""
    k, a = heis_product(code, [([c * x for x in g.mu], c * g.alpha) for g, c in zip(gens, coeffs)])
    red = heis_reduce(code, k, a)
    if any(red.mu):
        raise ValueError("relation does not close in the lattice")
    return red.alpha


def validate_stabilizer(code: GkpCode, stab: StabilizerSpec) -> StabilizerSpec:
    gens = []
    dim = code.lattice.dim
    for g in stab.generators:
        if len(g.mu) != dim:
            raise NotPauli("generator has the wrong number of dual coordinates")
        if not pauli_check(code, g):
            raise NotPauli(f"generator {g} fails the Pauli phase condition")
        gens.append(heis_reduce(code, g.mu, g.alpha))
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if code.E_dual(gens[i].mu, gens[j].mu).denominator != 1:
                raise NotCommuting(f"generators {i} and {j} do not commute")
    if gens:
        dd = code.dual_divisors
        k = len(gens)
        mat = [[g.mu[r] for g in gens] + [dd[r] * int(r == c) for c in range(dim)] for r in range(dim)]
        for rel in intmat.integer_kernel(mat):
            ph = _relation_phase(code, gens, rel[:k])
            if ph != 0:
                raise InconsistentPhases(
                    f"relation {rel[:k]} forces the scalar exp(2 pi i {ph}) into the group")
    return StabilizerSpec(tuple(gens))


def concatenate(code: GkpCode, stab: StabilizerSpec) -> IsogenyReport:
    stab = validate_stabilizer(code, stab)
    gens = stab.generators
    dim = code.lattice.dim
    dd = code.dual_divisors
    k = len(gens)
    # spanning set in dual coordinates: Frobenius lattice basis d_i e_i, then generators
    span = [[dd[r] * int(r == c) for c in range(dim)] + [g.mu[r] for g in gens] for r in range(dim)]
    h, v, rank = intmat.hnf_columns(span)
    new_cols = [[h[r][c] for r in range(dim)] for c in range(rank)]
    u = code.sympl.u
    frob_phase = [code.nu_turns([u[r][i] for r in range(dim)]) for i in range(dim)]
    phases = []
    for c in range(rank):
        t = [v[r][c] for r in range(dim + k)]
        # product of [f_i, nu(f_i)^{-1}]^{t_i} and generator powers is [h_c, beta]
        elems = [([t[i] * dd[i] * int(j == i) for j in range(dim)], -t[i] * frob_phase[i])
                 for i in range(dim)]
        elems += [([t[dim + j] * x for x in g.mu], t[dim + j] * g.alpha) for j, g in enumerate(gens)]
        kk, beta = heis_product(code, elems)
        assert kk == new_cols[c]
        phases.append(frac1(-beta))
    hm = intmat.transpose(new_cols)
    gd = [[code.E_dual([int(i == a) for i in range(dim)], [int(i == b) for i in range(dim)])
           for b in range(dim)] for a in range(dim)]
    new_gram = intmat.matmul(intmat.matmul(intmat.transpose(hm), gd), hm)
    if not intmat.is_integral(new_gram):
        raise NotCommuting("extended lattice is not symplectically integral")
    basis = code.dual_basis @ np.array(hm, dtype=float)
    lat = lattice_from_basis(basis)
    if [list(r) for r in lat.gram_E] != [[int(x) for x in row] for row in new_gram]:
        raise ArithmeticError("floating and exact symplectic Grams disagree")
    new_code = GkpCode.from_lattice(lat, Semicharacter(tuple(phases)))
    # lattice basis expressed in the new basis
    rel = intmat.matmul(intmat.inverse(hm), [[dd[r] * int(r == c) for c in range(dim)] for r in range(dim)])
    kernel = tuple(x for x in intmat.smith_invariants(intmat.as_int_matrix(rel)) if x != 1)
    index = int(np.prod(kernel)) if kernel else 1
    return IsogenyReport(new_code=new_code, index=index, kernel_divisors=kernel,
                         old_type=code.type, new_type=new_code.type,
                         dual_coords=tuple(tuple(col) for col in new_cols))


def stabilizer_of_extension(code: GkpCode, report: IsogenyReport) -> StabilizerSpec:
    """Generators [h, nu_S(h)^{-1}] over the extended lattice basis."""
    gens = [PauliElement(col, -ph) for col, ph in zip(report.dual_coords,
                                                       report.new_code.nu.base_phases)]
    return StabilizerSpec(tuple(gens))
