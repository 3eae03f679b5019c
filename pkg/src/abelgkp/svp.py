"""Lattice reduction and enumeration: LLL, Fincke-Pohst short vectors, closest
vectors and the systolic data of a code."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import BudgetExceeded, NumericalBreakdown, TrivialCode

NODE_BUDGET = 10 ** 8
REL_MARGIN = 1e-9


def _gso(g: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    n = len(g)
    mu = np.zeros((n, n))
    bstar = np.zeros(n)
    for i in range(n):
        for j in range(i):
            mu[i, j] = (g[i, j] - np.dot(mu[j, :j] * mu[i, :j], bstar[:j])) / bstar[j]
        bstar[i] = g[i, i] - np.dot(mu[i, :i] ** 2, bstar[:i])
        if not np.isfinite(bstar[i]) or bstar[i] <= 0:
            raise NumericalBreakdown("Gram-Schmidt norm became non-positive")
    return mu, bstar


def lll_reduce(gram, delta: float = 0.99) -> Tuple[np.ndarray, np.ndarray]:
    """LLL on a positive definite Gram matrix.

    Returns (T, G') with T unimodular (int64) and G' = T^T G T."""
    g = np.array(gram, dtype=float)
    n = len(g)
    t = np.eye(n, dtype=np.int64)
    k = 1
    steps = 0
    while k < n:
        steps += 1
        if steps > 100000:
            raise NumericalBreakdown("LLL did not terminate")
        mu, bstar = _gso(g)
        for j in range(k - 1, -1, -1):
            q = int(np.rint(mu[k, j]))
            if q:
                t[:, k] -= q * t[:, j]
                g[k, :] -= q * g[j, :]
                g[:, k] -= q * g[:, j]
                mu, bstar = _gso(g)
        if bstar[k] >= (delta - mu[k, k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            t[:, [k - 1, k]] = t[:, [k, k - 1]]
            g[[k - 1, k], :] = g[[k, k - 1], :]
            g[:, [k - 1, k]] = g[:, [k, k - 1]]
            k = max(k - 1, 1)
    return t, g


def _fp_enumerate(g: np.ndarray, center: np.ndarray, r2: float, budget: int) -> List[Tuple[np.ndarray, float]]:
    """All integer x with (x - c)^T G (x - c) <= r2 (Fincke-Pohst)."""
    n = len(g)
    try:
        r = np.linalg.cholesky(g).T  # upper: G = R^T R
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdown("Gram matrix is not positive definite") from exc
    qd = np.diag(r) ** 2
    qm = r / np.diag(r)[:, None]  # unit upper triangular
    out: List[Tuple[np.ndarray, float]] = []
    x = np.zeros(n, dtype=np.int64)
    nodes = 0

    def rec(i: int, partial: float) -> None:
        nonlocal nodes
        ci = center[i] - float(np.dot(qm[i, i + 1:], x[i + 1:] - center[i + 1:]))
        rem = r2 - partial
        if rem < 0:
            return
        w = np.sqrt(rem / qd[i])
        lo = int(np.ceil(ci - w - 1e-12))
        hi = int(np.floor(ci + w + 1e-12))
        for v in range(lo, hi + 1):
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"enumeration exceeded {budget} nodes")
            val = partial + qd[i] * (v - ci) ** 2
            if val > r2:
                continue
            x[i] = v
            if i == 0:
                out.append((x.copy(), val))
            else:
                rec(i - 1, val)
        x[i] = 0

    rec(n - 1, 0.0)
    return out


def _gram_of(lat_or_gram) -> np.ndarray:
    if hasattr(lat_or_gram, "gram_S"):
        return np.asarray(lat_or_gram.gram_S, dtype=float)
    return np.asarray(lat_or_gram, dtype=float)


def enumerate_short(lat_or_gram, radius: float, budget: int = NODE_BUDGET) -> List[Tuple[Tuple[int, ...], float]]:
    """Nonzero lattice vectors of norm <= radius, both signs.

    Returns (coords, norm^2) pairs sorted by norm, then lexicographically."""
    g = _gram_of(lat_or_gram)
    t, gr = lll_reduce(g)
    r2 = radius * radius * (1 + REL_MARGIN)
    found = _fp_enumerate(gr, np.zeros(len(g)), r2, budget)
    out = []
    for y, _ in found:
        if not np.any(y):
            continue
        x = t @ y
        nrm = float(x @ g @ x)
        if nrm <= r2:
            out.append((tuple(int(c) for c in x), nrm))
    out.sort(key=lambda e: (e[1], e[0]))
    return out


def enumerate_ball(basis, center, radius: float, budget: int = NODE_BUDGET) -> List[Tuple[Tuple[int, ...], float]]:
    """Integer x with |B x - center| <= radius; returns (coords, dist^2)."""
    b = np.asarray(basis, dtype=float)
    g = b.T @ b
    t, gr = lll_reduce(g)
    br = b @ t
    c = np.linalg.solve(br, np.asarray(center, dtype=float))
    r2 = radius * radius * (1 + REL_MARGIN)
    found = _fp_enumerate(gr, c, r2, budget)
    out = []
    for y, _ in found:
        x = t @ y
        d = b @ x - center
        out.append((tuple(int(v) for v in x), float(d @ d)))
    out.sort(key=lambda e: (e[1], e[0]))
    return out


def closest_vector(basis, target, budget: int = NODE_BUDGET) -> Tuple[Tuple[int, ...], np.ndarray]:
    """Closest lattice vector; exact ties (relative 1e-9) go to the
    lexicographically smallest coordinate vector."""
    b = np.asarray(getattr(basis, "basis", basis), dtype=float)
    target = np.asarray(target, dtype=float)
    t, _ = lll_reduce(b.T @ b)
    br = b @ t
    # Babai rounding gives an initial radius
    y = np.rint(np.linalg.solve(br, target))
    d0 = float(np.linalg.norm(br @ y - target))
    cands = enumerate_ball(b, target, d0, budget)
    best = cands[0][1]
    tied = [c for c, d in cands if d <= best * (1 + REL_MARGIN) + 1e-300]
    x = min(tied)
    return x, b @ np.asarray(x, dtype=float)


@dataclass(frozen=True)
class SystoleReport:
    ell: float
    count: int
    lambda1_lattice: float
    lambda1_dual: float
    minimizers: Tuple[Tuple[int, ...], ...]  # Frobenius dual coordinates
    minimizer_vectors: np.ndarray


def systole_report(code, budget: int = NODE_BUDGET) -> SystoleReport:
    if code.type.is_trivial():
        raise TrivialCode("type (1,...,1): the dual lattice equals the lattice")
    gd = code.dual_basis.T @ code.dual_basis
    dd = code.dual_divisors
    norms = np.sqrt(np.diag(gd))
    radius = float(min(nr for nr, d in zip(norms, dd) if d > 1))
    vecs = enumerate_short(gd, radius, budget)
    outside = [(k, r) for k, r in vecs if not code.dual_in_lattice(k)]
    ell2 = outside[0][1]
    mins = tuple(k for k, r in outside if r <= ell2 * (1 + 2 * REL_MARGIN))
    gl = code.lattice.gram_S
    lat_short = enumerate_short(gl, float(np.sqrt(np.min(np.diag(gl)))), budget)
    lam1 = float(np.sqrt(lat_short[0][1]))
    lam1d = float(np.sqrt(vecs[0][1]))
    mv = np.array([code.dual_vector(k) for k in mins])
    return SystoleReport(ell=float(np.sqrt(ell2)), count=len(mins), lambda1_lattice=lam1,
                         lambda1_dual=lam1d, minimizers=mins, minimizer_vectors=mv)
