"""Passive (orthogonal and symplectic) lattice automorphisms and their action on
the logical group K."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from . import intmat
from .errors import BudgetExceeded
from .gkpcode import GkpCode, frac1, sp_k_check
from .svp import REL_MARGIN, enumerate_short, lll_reduce


@dataclass(frozen=True, eq=False)
class PassiveAutomorphism:
    u_matrix: Tuple[Tuple[int, ...], ...]
    ambient: np.ndarray

    @property
    def u(self) -> np.ndarray:
        return np.array(self.u_matrix, dtype=np.int64)


@dataclass(frozen=True)
class SpKAction:
    matrices: Tuple[Tuple[Tuple[int, ...], ...], ...]
    image_order: int
    kernel_order: int


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= REL_MARGIN * max(1.0, abs(a), abs(b))


def passive_automorphisms(code: GkpCode, node_budget: int = 10 ** 6) -> List[PassiveAutomorphism]:
    """All integer U with U^T S U = S and U^T G U = G (S Euclidean, G symplectic Gram)."""
    lat = code.lattice
    s = np.asarray(lat.gram_S, dtype=float)
    g = np.array(lat.gram_E, dtype=object)
    t, sr = lll_reduce(s)
    t_obj = np.array(t.tolist(), dtype=object)
    gr = t_obj.T @ g @ t_obj
    dim = lat.dim
    vecs = enumerate_short(sr, float(np.sqrt(np.max(np.diag(sr)))))
    buckets = []
    for i in range(dim):
        target = sr[i, i]
        buckets.append([np.array(c, dtype=np.int64) for c, r2 in vecs if _close(r2, target)])
    sr_int = [[sr[i, j] for j in range(dim)] for i in range(dim)]
    found: List[np.ndarray] = []
    images: List[np.ndarray] = []
    nodes = 0

    def rec(i: int) -> None:
        nonlocal nodes
        if i == dim:
            found.append(np.stack(images, axis=1))
            return
        for y in buckets[i]:
            nodes += 1
            if nodes > node_budget:
                raise BudgetExceeded(f"automorphism search exceeded {node_budget} nodes")
            ok = True
            for j, x in enumerate(images):
                if not _close(float(x @ sr @ y), sr_int[j][i]):
                    ok = False
                    break
                e = sum(int(a) * int(b) for a, b in zip(x, (gr @ np.array(y.tolist(), dtype=object))))
                if e != gr[j, i]:
                    ok = False
                    break
            if ok:
                images.append(y)
                rec(i + 1)
                images.pop()

    rec(0)
    tinv = intmat.inverse(t.tolist())
    out = []
    for ur in found:
        u = intmat.matmul(intmat.matmul(t.tolist(), ur.tolist()), tinv)
        if not intmat.is_integral(u):
            continue
        u = tuple(tuple(int(x) for x in row) for row in u)
        out.append(u)
    out.sort(key=lambda m: tuple(x for row in m for x in row))
    b = lat.basis
    binv = np.linalg.inv(b)
    return [PassiveAutomorphism(u_matrix=u, ambient=b @ np.array(u, dtype=float) @ binv) for u in out]


def induced_action(code: GkpCode, u) -> Tuple[Tuple[int, ...], ...]:
    """Action of a lattice automorphism on K in Frobenius dual coordinates, rows
    reduced modulo their divisors."""
    p = code.dual_to_lattice
    pinv = code.lattice_to_dual
    u = [[int(x) for x in row] for row in (u.u_matrix if isinstance(u, PassiveAutomorphism) else u)]
    m = intmat.matmul(intmat.matmul(pinv, u), p)
    if not intmat.is_integral(m):
        raise ValueError("matrix does not preserve the symplectic dual lattice")
    dd = code.dual_divisors
    return tuple(tuple(int(x) % dd[r] for x in row) for r, row in enumerate(m))


def sp_k_image(code: GkpCode, autos: List[PassiveAutomorphism]) -> SpKAction:
    mats = [induced_action(code, a) for a in autos]
    dim = code.lattice.dim
    ident = tuple(tuple(int(i == j) % code.dual_divisors[i] for j in range(dim)) for i in range(dim))
    kernel = sum(1 for m in mats if m == ident)
    uniq = tuple(sorted(set(mats)))
    for m in uniq:
        if not sp_k_check(code.divisors, m):
            raise ArithmeticError("induced action is not symplectic on K")
    return SpKAction(matrices=uniq, image_order=len(uniq), kernel_order=kernel)


def u_shift(code: GkpCode, auto) -> Tuple[np.ndarray, Tuple[Fraction, ...]]:
    """Vector u with nu(M lam) / nu(lam) = exp(2 pi i E(u, M lam)), reduced into the
    half-open Frobenius dual cell. Returns (ambient vector, dual coordinates)."""
    u = [[int(x) for x in row] for row in (auto.u_matrix if isinstance(auto, PassiveAutomorphism) else auto)]
    dim = code.lattice.dim
    phases = []
    for i in range(dim):
        col = [u[r][i] for r in range(dim)]
        phases.append(frac1(code.nu_turns(col) - code.nu.base_phases[i]))
    # E(B y, M s_i) = (y^T G U)_i = phase_i
    gu = intmat.matmul(code.lattice.gram_E, u)
    y = intmat.matvec(intmat.inverse(intmat.transpose(gu)), phases)
    k = intmat.matvec(code.lattice_to_dual, y)
    k = tuple(frac1(x) for x in k)
    vec = code.dual_basis @ np.array([float(x) for x in k])
    return vec, k
