"""GKP codes (lattice plus semicharacter), the logical group K = dual/lattice and
the finite Pauli group.

Phases are exact rationals in turns: a value t stands for exp(2 pi i t) and is kept
reduced to [0, 1). Dual vectors are stored by integer coordinates in the Frobenius
dual basis lambda_1/d_1, ..., lambda_n/d_n, mu_1/d_1, ..., mu_n/d_n.

Heisenberg law: (u, a)(v, b) = (u + v, a b exp(-i pi E(u, v))). Within the code's
Heisenberg group, (lam, nu(lam)^{-1}) is the identity for lam in the lattice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import intmat
from .errors import NotInDual, NotPauli
from .symplattice import (GkpLattice, LatticeType, SymplecticBasis, frobenius_basis,
                          standard_gram)

Turns = Fraction


def frac1(x) -> Fraction:
    """Reduce a phase in turns to [0, 1)."""
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


def parse_turns(s) -> Fraction:
    if isinstance(s, str):
        return frac1(Fraction(s.strip()))
    return frac1(Fraction(s))


@dataclass(frozen=True)
class Semicharacter:
    """Values nu(s_i) on the stored lattice basis, in turns."""

    base_phases: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "base_phases", tuple(frac1(p) for p in self.base_phases))

    @classmethod
    def standard(cls, dim: int) -> "Semicharacter":
        return cls(tuple(Fraction(0) for _ in range(dim)))

    def is_standard(self) -> bool:
        return all(p == 0 for p in self.base_phases)


def semicharacter_standard(lat: GkpLattice) -> Semicharacter:
    return Semicharacter.standard(lat.dim)


def semicharacter_turns(gram: Sequence[Sequence[int]], phases: Sequence[Fraction],
                        coords: Sequence[int]) -> Fraction:
    m = [int(c) for c in coords]
    t = sum((p * c for p, c in zip(phases, m)), Fraction(0))
    cross = 0
    for i in range(len(m)):
        if m[i]:
            for j in range(i + 1, len(m)):
                cross += m[i] * m[j] * gram[i][j]
    return frac1(t + Fraction(cross, 2))


@dataclass(frozen=True, eq=False)
class GkpCode:
    lattice: GkpLattice
    nu: Semicharacter
    sympl: SymplecticBasis = field(repr=False)

    @classmethod
    def from_lattice(cls, lattice: GkpLattice, nu: Optional[Semicharacter] = None) -> "GkpCode":
        if nu is None:
            nu = Semicharacter.standard(lattice.dim)
        if len(nu.base_phases) != lattice.dim:
            raise ValueError("semicharacter length does not match lattice dimension")
        return cls(lattice=lattice, nu=nu, sympl=frobenius_basis(lattice))

    @property
    def n(self) -> int:
        return self.lattice.n

    @property
    def type(self) -> LatticeType:
        return self.sympl.type

    @property
    def divisors(self) -> Tuple[int, ...]:
        return self.sympl.type.divisors

    @property
    def dual_divisors(self) -> Tuple[int, ...]:
        """Modulus of each Frobenius dual coordinate (d_1..d_n, d_1..d_n)."""
        return self.divisors + self.divisors

    @property
    def order_K(self) -> int:
        return self.type.pfaffian ** 2

    @property
    def exponent(self) -> int:
        return self.type.exponent

    @cached_property
    def dual_to_lattice(self) -> List[List[Fraction]]:
        """Matrix mapping Frobenius dual coordinates to lattice coordinates."""
        dd = self.dual_divisors
        return [[Fraction(x, dd[j]) for j, x in enumerate(row)] for row in self.sympl.u]

    @cached_property
    def lattice_to_dual(self) -> List[List[Fraction]]:
        return intmat.inverse(self.dual_to_lattice)

    @cached_property
    def dual_basis(self) -> np.ndarray:
        """Ambient Frobenius dual basis (columns)."""
        p = np.array([[float(x) for x in row] for row in self.dual_to_lattice])
        out = self.lattice.basis @ p
        out.setflags(write=False)
        return out

    @cached_property
    def frobenius_ambient(self) -> np.ndarray:
        out = self.lattice.basis @ self.sympl.u_array.astype(float)
        out.setflags(write=False)
        return out

    def nu_turns(self, coords: Sequence[int]) -> Fraction:
        """nu at the lattice vector with the given stored-basis coordinates."""
        return semicharacter_turns(self.lattice.gram_E, self.nu.base_phases, coords)

    def E_dual(self, k: Sequence[int], q: Sequence[int]) -> Fraction:
        n = self.n
        return sum((Fraction(k[i] * q[n + i] - k[n + i] * q[i], d)
                    for i, d in enumerate(self.divisors)), Fraction(0))

    def dual_vector(self, k: Sequence[int]) -> np.ndarray:
        return self.dual_basis @ np.asarray(k, dtype=float)

    def dual_in_lattice(self, k: Sequence[int]) -> bool:
        return all(int(x) % d == 0 for x, d in zip(k, self.dual_divisors))

    def dual_to_lattice_coords(self, k: Sequence[int]) -> Tuple[int, ...]:
        """Stored-basis coordinates of a dual vector lying in the lattice."""
        x = intmat.matvec(self.dual_to_lattice, [int(c) for c in k])
        if any(c.denominator != 1 for c in x):
            raise ValueError("dual vector is not in the lattice")
        return tuple(int(c) for c in x)

    def dual_coords_of(self, v, tol: float = 1e-9) -> Tuple[int, ...]:
        """Frobenius dual coordinates of an ambient vector; raises NotInDual."""
        x = np.linalg.solve(self.dual_basis, np.asarray(v, dtype=float))
        r = np.rint(x)
        scale = max(1.0, float(np.max(np.linalg.norm(self.lattice.basis, axis=0))))
        if np.max(np.abs(self.dual_basis @ r - v)) > tol * scale:
            raise NotInDual("vector is not in the symplectic dual lattice")
        return tuple(int(c) for c in r)


@dataclass(frozen=True)
class QuotientGroup:
    divisors: Tuple[int, ...]
    reps: Tuple[Tuple[int, ...], ...]
    exponent: int

    @property
    def order(self) -> int:
        return len(self.reps)

    def index(self, k: Sequence[int]) -> int:
        dd = self.divisors + self.divisors
        pos = 0
        for x, d in zip(k, dd):
            pos = pos * d + int(x) % d
        return pos


def quotient_group(code: GkpCode) -> QuotientGroup:
    dd = code.dual_divisors
    reps = tuple(itertools.product(*(range(d) for d in dd)))
    return QuotientGroup(divisors=code.divisors, reps=reps, exponent=code.exponent)


def omega_standard(divisors: Sequence[int], x: Sequence[int], y: Sequence[int]) -> Fraction:
    """Standard commutator form on (Z/D)^2 in turns: sum (b_j u_j - a_j v_j)/d_j."""
    n = len(divisors)
    return frac1(sum((Fraction(x[n + j] * y[j] - x[j] * y[n + j], d)
                      for j, d in enumerate(divisors)), Fraction(0)))


@dataclass(frozen=True)
class PauliElement:
    """[mu, alpha]: mu by Frobenius dual coordinates, alpha in turns."""

    mu: Tuple[int, ...]
    alpha: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "mu", tuple(int(x) for x in self.mu))
        object.__setattr__(self, "alpha", frac1(self.alpha))


def pauli_check(code: GkpCode, p: PauliElement) -> bool:
    """alpha^{2m} = nu(m mu)^{-2} with m the exponent of K."""
    if len(p.mu) != code.lattice.dim:
        raise NotInDual("dual coordinate vector has the wrong length")
    m = code.exponent
    lam = code.dual_to_lattice_coords([m * x for x in p.mu])
    return frac1(2 * m * p.alpha + 2 * code.nu_turns(lam)) == 0


def pauli_from_vector(code: GkpCode, v, alpha=0) -> PauliElement:
    p = PauliElement(code.dual_coords_of(v), parse_turns(alpha))
    return p


def allowed_phases(code: GkpCode, mu: Sequence[int]) -> List[Fraction]:
    """All alpha making [mu, alpha] a Pauli element (2m values)."""
    m = code.exponent
    lam = code.dual_to_lattice_coords([m * int(x) for x in mu])
    base = -code.nu_turns(lam) / m
    return sorted(frac1(base + Fraction(j, 2 * m)) for j in range(2 * m))


def heis_reduce(code: GkpCode, k: Sequence[int], alpha) -> PauliElement:
    """Canonical representative: k = r + delta with r_i in [0, d_i), delta in the
    lattice; [r + delta, a] = [r, a nu(delta) exp(i pi E(r, delta))]."""
    dd = code.dual_divisors
    r = [int(x) % d for x, d in zip(k, dd)]
    delta = [int(x) - y for x, y in zip(k, r)]
    alpha = Fraction(alpha)
    if any(delta):
        lam = code.dual_to_lattice_coords(delta)
        alpha += code.nu_turns(lam) + code.E_dual(r, delta) / 2
    return PauliElement(tuple(r), alpha)


def heis_product(code: GkpCode, elements: Iterable[Tuple[Sequence[int], Fraction]]) -> Tuple[List[int], Fraction]:
    """Unreduced ordered product of (dual coords, turns) pairs."""
    total: Optional[List[int]] = None
    alpha = Fraction(0)
    for k, a in elements:
        k = [int(x) for x in k]
        if total is None:
            total = k
            alpha = Fraction(a)
            continue
        alpha += Fraction(a) - code.E_dual(total, k) / 2
        total = [x + y for x, y in zip(total, k)]
    if total is None:
        total = [0] * code.lattice.dim
    return total, alpha


def pauli_mul(code: GkpCode, p: PauliElement, q: PauliElement) -> PauliElement:
    k, a = heis_product(code, [(p.mu, p.alpha), (q.mu, q.alpha)])
    return heis_reduce(code, k, a)


def pauli_inv(code: GkpCode, p: PauliElement) -> PauliElement:
    return heis_reduce(code, [-x for x in p.mu], -p.alpha)


def pauli_pow(code: GkpCode, p: PauliElement, e: int) -> PauliElement:
    # [mu, a]^e = [e mu, e a] since E(mu, mu) = 0
    return heis_reduce(code, [e * x for x in p.mu], e * p.alpha)


def pauli_identity(code: GkpCode) -> PauliElement:
    return PauliElement(tuple([0] * code.lattice.dim), Fraction(0))


def commutator(code: GkpCode, p: PauliElement, q: PauliElement) -> Fraction:
    """Turns of p q p^{-1} q^{-1} = exp(-2 pi i E(mu_p, mu_q))."""
    return frac1(-code.E_dual(p.mu, q.mu))


def pauli_group(code: GkpCode) -> List[PauliElement]:
    out = []
    for r in quotient_group(code).reps:
        out.extend(PauliElement(r, a) for a in allowed_phases(code, r))
    return out


def sp_k_check(divisors: Sequence[int], phi) -> bool:
    """True iff the integer matrix phi defines an automorphism of (Z/D)^2 that
    preserves the standard commutator form."""
    divisors = tuple(int(d) for d in divisors)
    dd = divisors + divisors
    m = len(dd)
    phi = intmat.as_int_matrix(phi)
    if len(phi) != m or any(len(r) != m for r in phi):
        return False
    for s in range(m):
        for r in range(m):
            if (dd[r] * phi[s][r]) % dd[s]:
                return False
    cols = [[phi[s][r] for s in range(m)] for r in range(m)]
    for r in range(m):
        for c in range(m):
            e_r = [int(i == r) for i in range(m)]
            e_c = [int(i == c) for i in range(m)]
            if omega_standard(divisors, cols[r], cols[c]) != omega_standard(divisors, e_r, e_c):
                return False
    return True


def code_with_phases(lattice: GkpLattice, turns: Sequence) -> GkpCode:
    return GkpCode.from_lattice(lattice, Semicharacter(tuple(parse_turns(t) for t in turns)))


def frobenius_standard_turns(code: GkpCode, coords: Sequence[int]) -> Fraction:
    """Turns of the semicharacter that is trivial on the Frobenius basis,
    evaluated at stored-basis coordinates."""
    uinv = intmat.inverse(code.sympl.u)
    f = [int(x) for x in intmat.matvec(uinv, [int(c) for c in coords])]
    g = standard_gram(code.divisors)
    return semicharacter_turns(g, [Fraction(0)] * len(f), f)


def semicharacter_eval(code: GkpCode, coords: Sequence[int]) -> complex:
    t = code.nu_turns(coords)
    return complex(np.exp(2j * np.pi * float(t)))
