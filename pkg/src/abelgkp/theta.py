"""Canonical theta functions of a GKP code in the Fock picture.

A basis element f_b obeys f(z + lam) = nu(lam) exp(pi (H(lam, lam)/2 + H(z, lam))) f(z)
for every lattice vector lam. It is built from the classical theta series with
characteristic D^{-1} b in period coordinates, times exp((pi/2) B(z, z)) where B is
the complex bilinear form agreeing with H on the real span of the Frobenius
mu-vectors, and finally displaced by a vector c that converts the semicharacter
trivial on the Frobenius basis into the code's semicharacter.

Inner products use <f, g> = pi^{-n} int_{V/lattice} f conj(g) exp(-pi |z|^2) dz.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import intmat
from .decode import Periodizer
from .errors import AutomorphyFailure, GridTooCoarse, NotLogical, NumericalBreakdown, TruncationOverflow
from .gkpcode import GkpCode, PauliElement, frac1, frobenius_standard_turns, pauli_check
from .symplattice import to_complex

TRUNC_CAP = 64
TILE_POINTS = 1 << 15


@dataclass(frozen=True, eq=False)
class ThetaBasis:
    code: GkpCode
    omega: np.ndarray
    char_shift: np.ndarray
    trunc_radius: int
    labels: Tuple[Tuple[int, ...], ...]
    period_map: np.ndarray
    bform: np.ndarray

    @property
    def size(self) -> int:
        return len(self.labels)


def _char_shift(code: GkpCode) -> np.ndarray:
    dim = code.lattice.dim
    delta = []
    for i in range(dim):
        e = [int(i == j) for j in range(dim)]
        delta.append(frac1(code.nu.base_phases[i] - frobenius_standard_turns(code, e)))
    # E(c, s_i) = delta_i with c = B y  <=>  G^T y = delta
    gt = intmat.transpose(code.lattice.gram_E)
    y = intmat.matvec(intmat.inverse(gt), delta)
    return code.lattice.basis @ np.array([float(x) for x in y])


def theta_basis(code: GkpCode, tol: float = 1e-8, samples: int = 20, seed: int = 0) -> ThetaBasis:
    n = code.n
    fro = code.frobenius_ambient
    m_lam = to_complex(fro[:, :n].T).T
    m_mu = to_complex(fro[:, n:].T).T
    d = np.diag(np.array(code.divisors, dtype=float))
    inv_mu = np.linalg.inv(m_mu)
    t = d @ inv_mu
    omega = t @ m_lam
    if np.max(np.abs(omega - omega.T)) > 1e-8 * max(1.0, float(np.max(np.abs(omega)))):
        raise NumericalBreakdown("period matrix is not symmetric")
    omega = 0.5 * (omega + omega.T)
    y = omega.imag
    lam_min = float(np.min(np.linalg.eigvalsh(y)))
    if lam_min <= 0:
        raise NumericalBreakdown("imaginary part of the period matrix is not positive definite")
    g_mu = fro[:, n:].T @ fro[:, n:]
    bform = inv_mu.T @ g_mu @ inv_mu
    radius = int(math.ceil(0.5 + math.sqrt(40.0 / (math.pi * lam_min))))
    if radius > TRUNC_CAP:
        raise TruncationOverflow(f"truncation radius {radius} exceeds cap {TRUNC_CAP}")
    labels = tuple(itertools.product(*(range(di) for di in code.divisors)))
    basis = ThetaBasis(code=code, omega=omega, char_shift=_char_shift(code), trunc_radius=radius,
                       labels=labels, period_map=t, bform=bform)
    res = automorphy_residual(basis, samples, seed)
    if res > tol:
        raise AutomorphyFailure(f"automorphy residual {res:.3e} exceeds {tol:.1e}")
    return basis


def _herm(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """H(z, w) = z . conj(w) along the last axis."""
    return np.sum(z * np.conj(w), axis=-1)


def _eval_labels(basis: ThetaBasis, z: np.ndarray) -> np.ndarray:
    """Values of every f_b at complex points z (m, n); returns (size, m)."""
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    c = to_complex(basis.char_shift)
    zc = z + c
    pre = -math.pi * (0.5 * float(np.real(_herm(c, c))) + _herm(z, c))
    pre = pre + 0.5 * math.pi * np.einsum("mi,ij,mj->m", zc, basis.bform, zc)
    w = zc @ basis.period_map.T
    yinv = np.linalg.inv(basis.omega.imag)
    s = w.imag @ yinv
    n = basis.code.n
    r = basis.trunc_radius
    box = np.array(list(itertools.product(range(-r, r + 1), repeat=n)), dtype=float)
    out = np.empty((basis.size, len(z)), dtype=complex)
    for li, lab in enumerate(basis.labels):
        cb = np.array(lab, dtype=float) / np.array(basis.code.divisors, dtype=float)
        k0 = np.rint(-s - cb)
        kc = k0[None, :, :] + box[:, None, :] + cb[None, None, :]
        ex = (1j * math.pi * np.einsum("jmi,ik,jmk->jm", kc, basis.omega, kc)
              + 2j * math.pi * np.einsum("jmi,mi->jm", kc, w) + pre[None, :])
        top = np.max(ex.real, axis=0)
        out[li] = np.exp(top) * np.sum(np.exp(ex - top[None, :]), axis=0)
    return out


def theta_eval(basis: ThetaBasis, b: Sequence[int], z) -> complex:
    """f_b at a complex n-vector z (or an array of such, returning an array)."""
    b = tuple(int(x) % d for x, d in zip(b, basis.code.divisors))
    li = basis.labels.index(b)
    z = np.asarray(z, dtype=complex)
    vals = _eval_labels(basis, np.atleast_2d(z))[li]
    return complex(vals[0]) if z.ndim == 1 else vals


def automorphy_residual(basis: ThetaBasis, samples: int = 100, seed: int = 0) -> float:
    if samples < 1:
        raise ValueError("samples must be positive")
    code = basis.code
    lat = code.lattice
    rng = np.random.default_rng(seed)
    # centered cell keeps the automorphy factor, and so rounding, small
    pts = (rng.random((samples, lat.dim)) - 0.5) @ lat.basis.T
    z = to_complex(pts)
    f0 = _eval_labels(basis, z)
    worst = 0.0
    for i in range(lat.dim):
        lam = to_complex(lat.basis[:, i])
        nu = np.exp(2j * math.pi * float(code.nu.base_phases[i]))
        factor = nu * np.exp(math.pi * (0.5 * float(np.real(_herm(lam, lam))) + _herm(z, lam)))
        f1 = _eval_labels(basis, z + lam)
        res = np.abs(f1 - factor[None, :] * f0) / np.maximum(1.0, np.abs(f0))
        worst = max(worst, float(np.max(res)))
    return worst


@dataclass(frozen=True)
class HermitianGram:
    entries: np.ndarray
    grid: int
    coarse: np.ndarray

    @property
    def refinement_change(self) -> float:
        return float(np.max(np.abs(self.entries - self.coarse)))


def default_grid(n: int) -> int:
    return 256 if n == 1 else 48


Weight = Callable[[np.ndarray], np.ndarray]


def _grams(basis: ThetaBasis, grid: int, weights: Sequence[Optional[Weight]],
           pauli: Optional[PauliElement] = None) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Trapezoid sums of phi_b conj(f_b') exp(-pi|z|^2) w(z) over the lattice cell.

    phi = f, or the displaced basis when ``pauli`` is given. Returns, per weight,
    the full-grid matrix and the matrix from the even sub-grid (grid / 2)."""
    code = basis.code
    lat = code.lattice
    dim = lat.dim
    if grid % 2:
        raise ValueError("grid must be even")
    total = grid ** dim
    shape = (grid,) * dim
    size = basis.size
    if pauli is not None:
        u_real = code.dual_vector(pauli.mu)
        u = to_complex(u_real)
        alpha = np.exp(2j * math.pi * float(pauli.alpha))
    acc = [[np.zeros((size, size), complex), np.zeros((size, size), complex)] for _ in weights]
    for s in range(0, total, TILE_POINTS):
        idx = np.arange(s, min(s + TILE_POINTS, total))
        multi = np.stack(np.unravel_index(idx, shape), axis=1)
        even = np.all(multi % 2 == 0, axis=1)
        pts = (multi / grid) @ lat.basis.T
        z = to_complex(pts)
        f = _eval_labels(basis, z)
        if pauli is None:
            phi = f
        else:
            phase = alpha * np.exp(-math.pi * (0.5 * float(np.real(_herm(u, u))) + _herm(z, u)))
            phi = phase[None, :] * _eval_labels(basis, z + u)
        base = np.exp(-math.pi * np.sum(pts ** 2, axis=1))
        for wi, wfn in enumerate(weights):
            wt = base if wfn is None else base * wfn(pts)
            acc[wi][0] += (phi * wt[None, :]) @ np.conj(f).T
            acc[wi][1] += (phi[:, even] * wt[None, even]) @ np.conj(f[:, even]).T
    scale = lat.covolume / math.pi ** code.n
    half_total = (grid // 2) ** dim
    return [(a * scale / total, b * scale / half_total) for a, b in acc]


def _checked(full: np.ndarray, half: np.ndarray, grid: int, tol: float,
             ref: Optional[float] = None) -> HermitianGram:
    if ref is None:
        ref = float(np.max(np.abs(np.diag(full))))
    if np.max(np.abs(full - half)) > tol * ref:
        raise GridTooCoarse(f"grid {grid} differs from grid {grid // 2} by more than {tol:.1e} relative")
    return HermitianGram(entries=full, grid=grid, coarse=half)


def theta_gram(basis: ThetaBasis, grid: Optional[int] = None, tol: float = 1e-8) -> HermitianGram:
    if basis.code.n > 2:
        raise ValueError("quadrature supports n <= 2")
    grid = grid or default_grid(basis.code.n)
    (full, half), = _grams(basis, grid, [None])
    return _checked(full, half, grid, tol)


def _envelope_weight(basis: ThetaBasis, beta: float) -> Weight:
    a = math.expm1(2 * beta)
    n = basis.code.n
    per = Periodizer(basis.code.lattice.basis, math.sqrt(1.0 / (2 * math.pi * a)), relative=False)
    const = math.exp(2 * n * beta) / a ** n
    return lambda pts: const * per.density(pts)


def envelope_gram(basis: ThetaBasis, beta: float, grid: Optional[int] = None, tol: float = 1e-8) -> HermitianGram:
    """Gram of the rescaled functions z -> f(exp(-beta) z) in the Fock inner product."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if basis.code.n > 2:
        raise ValueError("quadrature supports n <= 2")
    grid = grid or default_grid(basis.code.n)
    (full, half), = _grams(basis, grid, [_envelope_weight(basis, beta)])
    return _checked(full, half, grid, tol)


def conformal_factor(code: GkpCode, beta: float) -> float:
    return (-math.expm1(-2 * beta)) ** code.n * code.lattice.covolume


def isometry_sweep(code: GkpCode, betas: Sequence[float], grid: Optional[int] = None,
                   tol: float = 1e-8) -> List[dict]:
    """Deviation max|c(beta) envelope_gram - theta_gram| / max|theta_gram| per beta."""
    betas = [float(b) for b in betas]
    if any(b <= 0 for b in betas):
        raise ValueError("betas must be positive")
    basis = theta_basis(code)
    grid = grid or default_grid(code.n)
    weights = [None] + [_envelope_weight(basis, b) for b in betas]
    mats = _grams(basis, grid, weights)
    theta_full, theta_half = mats[0]
    _checked(theta_full, theta_half, grid, tol)
    ref = float(np.max(np.abs(theta_full)))
    out = []
    for beta, (full, half) in zip(betas, mats[1:]):
        c = conformal_factor(code, beta)
        dev = float(np.max(np.abs(c * full - theta_full))) / ref
        dev_half = float(np.max(np.abs(c * half - theta_half))) / ref
        out.append({"beta": beta, "c_beta": c, "deviation": dev,
                    "converged": bool(abs(dev - dev_half) <= tol + 1e-3 * dev)})
    return out


def displacement_action(basis: ThetaBasis, p: PauliElement, grid: Optional[int] = None,
                        tol: float = 1e-8) -> np.ndarray:
    """Matrix of [mu, alpha] on the unit-normalized basis: p f_b = sum_b' M[b', b] f_b'."""
    if not pauli_check(basis.code, p):
        raise NotLogical("element fails the Pauli phase condition")
    if basis.code.n > 2:
        raise ValueError("quadrature supports n <= 2")
    grid = grid or default_grid(basis.code.n)
    (g, g_half), = _grams(basis, grid, [None])
    _checked(g, g_half, grid, tol)
    (a, a_half), = _grams(basis, grid, [None], pauli=p)
    _checked(a, a_half, grid, tol, ref=float(np.max(np.abs(np.diag(g)))))
    m = (a @ np.linalg.inv(g)).T
    nrm = np.sqrt(np.real(np.diag(g)))
    return (nrm[:, None] * m) / nrm[None, :]


def with_char_shift(basis: ThetaBasis, shift) -> ThetaBasis:
    return replace(basis, char_shift=np.asarray(shift, dtype=float))
