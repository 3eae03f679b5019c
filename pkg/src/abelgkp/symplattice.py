"""Symplectically integral lattices in R^{2n}.

Vectors use interleaved coordinates (x1, y1, ..., xn, yn). The symplectic form is
E(u, v) = sum_i (x_i y'_i - y_i x'_i), i.e. E(u, v) = u^T J v with J block diagonal
in [[0, 1], [-1, 0]]. The complex structure identifies (x, y) with z = x - i y, so
that H(z, w) = z . conj(w) has real part the Euclidean product and imaginary part E.

A basis matrix holds lattice generators as columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from . import intmat
from .errors import NotSiegel, NotSymplecticallyIntegral, SingularBasis


def symplectic_form(n: int) -> np.ndarray:
    j = np.zeros((2 * n, 2 * n))
    for i in range(n):
        j[2 * i, 2 * i + 1] = 1.0
        j[2 * i + 1, 2 * i] = -1.0
    return j


def E(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(np.sum(u[0::2] * v[1::2] - u[1::2] * v[0::2]))


def to_complex(v: np.ndarray) -> np.ndarray:
    """Interleaved real coordinates (..., 2n) to complex (..., n)."""
    v = np.asarray(v, dtype=float)
    return v[..., 0::2] - 1j * v[..., 1::2]


def to_real(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    out[..., 0::2] = z.real
    out[..., 1::2] = -z.imag
    return out


def standard_gram(divisors: Sequence[int]) -> list:
    """Alternating integer matrix [[0, D], [-D, 0]] in (lambda..., mu...) order."""
    n = len(divisors)
    g = [[0] * (2 * n) for _ in range(2 * n)]
    for i, d in enumerate(divisors):
        g[i][n + i] = int(d)
        g[n + i][i] = -int(d)
    return g


@dataclass(frozen=True)
class LatticeType:
    divisors: Tuple[int, ...]

    def __post_init__(self):
        ds = tuple(int(d) for d in self.divisors)
        if not ds or any(d < 1 for d in ds):
            raise ValueError("divisors must be positive integers")
        if any(b % a for a, b in zip(ds, ds[1:])):
            raise ValueError(f"divisors {ds} do not form a divisibility chain")
        object.__setattr__(self, "divisors", ds)

    @property
    def n(self) -> int:
        return len(self.divisors)

    @property
    def pfaffian(self) -> int:
        return int(np.prod(self.divisors))

    @property
    def exponent(self) -> int:
        return self.divisors[-1]

    def is_trivial(self) -> bool:
        return all(d == 1 for d in self.divisors)

    def as_list(self) -> list:
        return list(self.divisors)


@dataclass(frozen=True, eq=False)
class GkpLattice:
    """A full-rank lattice with integral symplectic Gram matrix."""

    n: int
    basis: np.ndarray
    gram_E: Tuple[Tuple[int, ...], ...]
    gram_S: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def gram_E_array(self) -> np.ndarray:
        return np.array(self.gram_E, dtype=np.int64)

    @property
    def covolume(self) -> float:
        return float(np.sqrt(abs(np.linalg.det(self.gram_S))))

    def vector(self, coords) -> np.ndarray:
        return self.basis @ np.asarray(coords, dtype=float)


@dataclass(frozen=True, eq=False)
class SymplecticBasis:
    """Frobenius basis: columns of ``u`` give lambda_1..lambda_n, mu_1..mu_n in
    lattice coordinates, with E(lambda_i, mu_j) = d_i delta_ij and all other
    pairings zero."""

    u: Tuple[Tuple[int, ...], ...]
    type: LatticeType
    basis: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def u_array(self) -> np.ndarray:
        return np.array(self.u, dtype=np.int64)


def lattice_from_basis(basis, tol: float = 1e-9) -> GkpLattice:
    b = np.array(basis, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape[0] % 2:
        raise ValueError(f"basis must be a square matrix of even size, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ValueError("basis has non-finite entries")
    dim = b.shape[0]
    scale = float(np.max(np.linalg.norm(b, axis=0)))
    if scale == 0.0 or abs(np.linalg.det(b)) <= tol * scale ** dim:
        raise SingularBasis("basis vectors are linearly dependent")
    g = b.T @ symplectic_form(dim // 2) @ b
    r = np.rint(g)
    err = float(np.max(np.abs(g - r)))
    if err > tol * max(1.0, scale * scale):
        raise NotSymplecticallyIntegral(
            f"symplectic Gram deviates from integers by {err:.3e}")
    gram = tuple(tuple(int(x) for x in row) for row in r)
    if intmat.det(gram) == 0:
        raise NotSymplecticallyIntegral("symplectic form is degenerate on the lattice")
    b.setflags(write=False)
    s = b.T @ b
    s.setflags(write=False)
    return GkpLattice(n=dim // 2, basis=b, gram_E=gram, gram_S=s)


def lattice_from_period_matrix(omega, divisors: Sequence[int], tol: float = 1e-9) -> GkpLattice:
    """Lattice C (Omega Z^n + D Z^n) with C^T C = (Im Omega)^{-1}.

    Columns are ordered Omega e_1..Omega e_n, d_1 e_1..d_n e_n, which is a
    Frobenius basis of the returned lattice.
    """
    om = np.atleast_2d(np.array(omega, dtype=complex))
    t = LatticeType(tuple(divisors))
    n = om.shape[0]
    if om.shape != (n, n) or t.n != n:
        raise ValueError("period matrix and type have inconsistent sizes")
    if np.max(np.abs(om - om.T)) > tol * max(1.0, np.max(np.abs(om))):
        raise NotSiegel("period matrix is not symmetric")
    y = om.imag
    try:
        low = np.linalg.cholesky(np.linalg.inv(y))
    except np.linalg.LinAlgError as exc:
        raise NotSiegel("imaginary part is not positive definite") from exc
    c = low.T
    cols = np.hstack([c @ om, c @ np.diag(np.array(t.divisors, dtype=complex))])
    return lattice_from_basis(to_real(cols.T).T, tol=tol)


def frobenius_basis(lat_or_gram) -> SymplecticBasis:
    """Exact symplectic reduction of the integer Gram matrix to standard form."""
    if isinstance(lat_or_gram, GkpLattice):
        gram = [list(r) for r in lat_or_gram.gram_E]
        ambient = lat_or_gram.basis
    else:
        gram = intmat.as_int_matrix(lat_or_gram)
        ambient = None
    m = len(gram)
    if m % 2 or any(len(r) != m for r in gram):
        raise ValueError("Gram matrix must be square of even size")
    for i in range(m):
        for j in range(m):
            if gram[i][j] != -gram[j][i]:
                raise ValueError("Gram matrix is not alternating")
    a = [row[:] for row in gram]
    v = intmat.identity(m)  # columns: current basis in original coordinates

    def addcol(dst: int, src: int, q: int) -> None:
        # b_dst <- b_dst + q b_src
        if q == 0:
            return
        for row in v:
            row[dst] += q * row[src]
        for row in a:
            row[dst] += q * row[src]
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]

    def negate(j: int) -> None:
        for row in v:
            row[j] = -row[j]
        for row in a:
            row[j] = -row[j]
        a[j] = [-x for x in a[j]]

    remaining = list(range(m))
    lams, mus, divs = [], [], []
    while remaining:
        while True:
            cands = [(abs(a[i][j]), ii, jj) for ii, i in enumerate(remaining)
                     for jj, j in enumerate(remaining) if ii < jj and a[i][j] != 0]
            if not cands:
                raise NotSymplecticallyIntegral("symplectic form is degenerate")
            _, ii, jj = min(cands)
            i, j = remaining[ii], remaining[jj]
            if a[i][j] < 0:
                negate(j)
            p = a[i][j]
            others = [l for l in remaining if l not in (i, j)]
            shrunk = False
            for l in others:
                # clear E(b_i, b_l) using b_j, then E(b_j, b_l) using b_i
                addcol(l, j, -(a[i][l] // p))
                addcol(l, i, a[j][l] // p)
                if a[i][l] or a[j][l]:
                    shrunk = True
            if shrunk:
                continue
            bad = next(((l, k) for l in others for k in others if a[l][k] % p), None)
            if bad is None:
                break
            addcol(i, bad[0], 1)
        lams.append(i)
        mus.append(j)
        divs.append(p)
        remaining = [l for l in remaining if l not in (i, j)]
    order = lams + mus
    u = tuple(tuple(v[r][c] for c in order) for r in range(m))
    t = LatticeType(tuple(divs))
    amb = None
    if ambient is not None:
        amb = ambient @ np.array(u, dtype=float)
        amb.setflags(write=False)
    return SymplecticBasis(u=u, type=t, basis=amb)


def symplectic_dual(lat: GkpLattice) -> np.ndarray:
    """Basis of the symplectic dual lattice: columns of basis . gram_E^{-1}."""
    ginv = intmat.inverse(lat.gram_E)
    return lat.basis @ np.array([[float(x) for x in row] for row in ginv])


def member(lat: GkpLattice, v, tol: float = 1e-9) -> Optional[Tuple[int, ...]]:
    """Integer coordinates of v in the lattice basis, or None."""
    v = np.asarray(v, dtype=float)
    x = np.linalg.solve(lat.basis, v)
    r = np.rint(x)
    scale = max(1.0, float(np.max(np.linalg.norm(lat.basis, axis=0))))
    if np.max(np.abs(lat.basis @ r - v)) <= tol * scale:
        return tuple(int(c) for c in r)
    return None


def rational_vector(x) -> Tuple[Fraction, ...]:
    return tuple(Fraction(c) for c in x)
