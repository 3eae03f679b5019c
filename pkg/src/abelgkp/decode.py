"""Displacement noise, maximum-likelihood and closest-point decoding, and
robustness / fragility estimates.

The decoder sees only the syndrome class y = v mod dual lattice. Candidates are
x_k = y0 + mu_k over coset representatives mu_k of K, where y0 is the
representative of y in the half-open Frobenius dual parallelepiped. A decode
succeeds when the chosen candidate differs from v by a lattice vector.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.special import gammaln, logsumexp
from scipy.stats import binomtest

from .errors import GridTooCoarse
from .gkpcode import GkpCode, quotient_group
from .svp import closest_vector, enumerate_ball, enumerate_short, lll_reduce, systole_report

TIE_REL = 1e-12
DEFAULT_EPS = 1e-12
CHUNK_ELEMS = 2_000_000


@dataclass(frozen=True)
class NoiseModel:
    kind: str
    sigma: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "gaussian" and not (self.sigma is not None and self.sigma > 0):
            raise ValueError("gaussian noise needs sigma > 0")

    @classmethod
    def gaussian(cls, sigma: float) -> "NoiseModel":
        return cls("gaussian", float(sigma))

    @classmethod
    def uniform(cls) -> "NoiseModel":
        return cls("uniform", None)


@dataclass(frozen=True)
class DecoderReport:
    estimate: float
    ci_low: float
    ci_high: float
    samples_or_grid: int
    decoder: str
    noise: str
    sigma: Optional[float] = None
    analytic_bound: Optional[float] = None
    leading_term: Optional[float] = None
    seed: Optional[int] = None
    method: str = "mc"

    @property
    def half_width(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)

    @property
    def fragility(self) -> float:
        return 1.0 - self.estimate

    def to_dict(self) -> dict:
        return asdict(self)


def truncation_t(eps: float) -> float:
    return math.sqrt(2.0 * math.log(1.0 / eps)) + 6.0


def _ball_volume(dim: int, r: float) -> float:
    return math.exp(0.5 * dim * math.log(math.pi) - gammaln(0.5 * dim + 1)) * r ** dim


class Periodizer:
    """Vectorized log F_sigma(v), F_sigma(v) = sum over the lattice of f_sigma(v + lam).

    Sums either over lattice shifts or, when fewer terms are needed, over the
    Euclidean dual lattice via Poisson summation. With ``relative=False`` the
    shift set only guarantees absolute accuracy, which suffices for integrals."""

    def __init__(self, basis: np.ndarray, sigma: float, eps: float = DEFAULT_EPS,
                 relative: bool = True):
        b = np.asarray(basis, dtype=float)
        self.dim = b.shape[0]
        self.sigma = float(sigma)
        self.covol = abs(float(np.linalg.det(b)))
        t, _ = lll_reduce(b.T @ b)
        self.br = b @ t
        self.br_inv = np.linalg.inv(self.br)
        tt = truncation_t(eps)
        rho = 0.5 * float(np.sum(np.linalg.norm(self.br, axis=0)))
        r_direct = (2 if relative else 1) * rho + self.sigma * tt
        r_dual = tt / (2 * math.pi * self.sigma)
        n_direct = _ball_volume(self.dim, r_direct) / self.covol
        n_dual = _ball_volume(self.dim, r_dual) * self.covol
        self.mode = "dual" if n_dual < n_direct else "direct"
        if self.mode == "direct":
            short = enumerate_short(self.br.T @ self.br, r_direct)
            coords = np.array([np.zeros(self.dim)] + [np.array(c, float) for c, _ in short])
            self.shifts = coords @ self.br.T
            self.log_norm = -0.5 * self.dim * math.log(2 * math.pi * self.sigma ** 2)
        else:
            bd = np.linalg.inv(b).T
            short = enumerate_short(bd.T @ bd, r_dual)
            coords = np.array([np.zeros(self.dim)] + [np.array(c, float) for c, _ in short])
            self.freqs = coords @ bd.T
            self.weights = np.exp(-2 * math.pi ** 2 * self.sigma ** 2 * np.sum(self.freqs ** 2, axis=1))
        self.nterms = len(self.shifts) if self.mode == "direct" else len(self.freqs)

    def reduce(self, v: np.ndarray) -> np.ndarray:
        return v - np.rint(v @ self.br_inv.T) @ self.br.T

    def log_density(self, v) -> np.ndarray:
        v = np.atleast_2d(np.asarray(v, dtype=float))
        out = np.empty(len(v))
        step = max(1, CHUNK_ELEMS // self.nterms)
        for s in range(0, len(v), step):
            out[s:s + step] = self._chunk(v[s:s + step])
        return out

    def density(self, v) -> np.ndarray:
        return np.exp(self.log_density(v))

    def _chunk(self, v: np.ndarray) -> np.ndarray:
        if self.mode == "direct":
            w = self.reduce(v)
            d2 = (np.sum(w ** 2, axis=1)[:, None] + 2 * w @ self.shifts.T
                  + np.sum(self.shifts ** 2, axis=1)[None, :])
            return logsumexp(-d2 / (2 * self.sigma ** 2), axis=1) + self.log_norm
        f = np.cos(2 * math.pi * (v @ self.freqs.T)) @ self.weights / self.covol
        return np.log(np.maximum(f, np.finfo(float).tiny))


def periodized_density(code: GkpCode, v, sigma: float, eps: float = 1e-6) -> float:
    """F_sigma(v) summed over lattice shifts within |v + lam| <= |v + lam*| + sigma t(eps)."""
    if not (0 < eps < 1e-3):
        raise ValueError("eps must lie in (0, 1e-3)")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    b = code.lattice.basis
    v = np.asarray(v, dtype=float)
    x, lam = closest_vector(b, -v)
    w = v + lam
    r0 = float(np.linalg.norm(w))
    terms = enumerate_ball(b, -w, r0 + sigma * truncation_t(eps))
    d2 = np.array([d for _, d in terms])
    dim = code.lattice.dim
    return float(np.sum(np.exp(-d2 / (2 * sigma ** 2))) / (2 * math.pi * sigma ** 2) ** (dim / 2))


def _coset_setup(code: GkpCode):
    qg = quotient_group(code)
    reps = np.array(qg.reps, dtype=np.int64)
    vecs = reps @ code.dual_basis.T
    return qg, reps, vecs


def syndrome_split(code: GkpCode, v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(y0, kappa): y0 in the dual parallelepiped, v = y0 + dual_basis @ kappa."""
    v = np.atleast_2d(np.asarray(v, dtype=float))
    x = v @ np.linalg.inv(code.dual_basis).T
    kappa = np.floor(x + 1e-12)
    y0 = v - kappa @ code.dual_basis.T
    return y0, kappa.astype(np.int64)


def _true_index(code: GkpCode, kappa: np.ndarray) -> np.ndarray:
    dd = np.array(code.dual_divisors, dtype=np.int64)
    idx = np.zeros(len(kappa), dtype=np.int64)
    for j, d in enumerate(dd):
        idx = idx * d + np.mod(kappa[:, j], d)
    return idx


def _mld_choice(logf: np.ndarray, cand_norm2: np.ndarray) -> np.ndarray:
    """Winner per row: max log F, ties within TIE_REL by smaller norm then index."""
    best = np.max(logf, axis=1, keepdims=True)
    tied = logf >= best - TIE_REL
    key = np.where(tied, cand_norm2, np.inf)
    m = np.min(key, axis=1, keepdims=True)
    tied &= key <= m * (1 + 1e-9) + 1e-300
    return np.argmax(tied, axis=1)


def mld_error_class(code: GkpCode, v, sigma: Optional[float], periodizer: Optional[Periodizer] = None) -> np.ndarray:
    """Index in K of (chosen candidate - v); 0 means the decode succeeded.

    sigma=None models uniform noise (constant density)."""
    qg, reps, vecs = _coset_setup(code)
    y0, kappa = syndrome_split(code, v)
    cands = y0[:, None, :] + vecs[None, :, :]
    if sigma is None:
        logf = np.zeros(cands.shape[:2])
    else:
        per = periodizer or Periodizer(code.lattice.basis, sigma)
        logf = per.log_density(cands.reshape(-1, cands.shape[-1])).reshape(cands.shape[:2])
    choice = _mld_choice(logf, np.sum(cands ** 2, axis=2))
    true = _true_index(code, kappa)
    chosen = reps[choice]
    truth = reps[true]
    return _true_index(code, chosen - truth)


def mld_success(code: GkpCode, v, sigma: float) -> bool:
    """Single-sample MLD decision using the reference truncation rule."""
    qg, reps, vecs = _coset_setup(code)
    y0, kappa = syndrome_split(code, v)
    cands = y0[0][None, :] + vecs
    logf = np.log(np.maximum([periodized_density(code, c, sigma) for c in cands],
                             np.finfo(float).tiny))[None, :]
    choice = _mld_choice(logf, np.sum(cands ** 2, axis=1)[None, :])[0]
    return int(choice) == int(_true_index(code, kappa)[0])


class DualCandidates:
    """Closest dual-lattice point search: rounding in a reduced dual basis, then
    comparison against all dual vectors short enough to matter."""

    def __init__(self, code: GkpCode):
        bd = code.dual_basis
        t, _ = lll_reduce(bd.T @ bd)
        self.t = t
        self.br = bd @ t
        self.br_inv = np.linalg.inv(self.br)
        reach = float(np.sum(np.linalg.norm(self.br, axis=0)))
        short = enumerate_short(bd.T @ bd, reach)
        coords = [tuple([0] * bd.shape[0])] + [c for c, _ in short]
        self.coords = np.array(coords, dtype=np.int64)
        self.vecs = self.coords @ bd.T
        self.norm2 = np.sum(self.vecs ** 2, axis=1)

    def closest(self, v: np.ndarray) -> np.ndarray:
        """Frobenius dual coordinates of the closest dual vector for each row."""
        v = np.atleast_2d(np.asarray(v, dtype=float))
        out = np.empty((len(v), self.coords.shape[1]), dtype=np.int64)
        step = max(1, CHUNK_ELEMS // len(self.vecs))
        for s in range(0, len(v), step):
            vv = v[s:s + step]
            r = np.rint(vv @ self.br_inv.T)
            y = vv - r @ self.br.T
            d2 = self.norm2[None, :] - 2 * y @ self.vecs.T
            j = np.argmin(d2, axis=1)
            out[s:s + step] = (r.astype(np.int64) @ self.t.T) + self.coords[j]
        return out


def med_error_class(code: GkpCode, v, cands: Optional[DualCandidates] = None) -> np.ndarray:
    cands = cands or DualCandidates(code)
    return _true_index(code, cands.closest(v))


def med_success(code: GkpCode, v) -> bool:
    k, _ = closest_vector(code.dual_basis, np.asarray(v, dtype=float))
    return code.dual_in_lattice(k)


def _wilson(successes: int, trials: int) -> Tuple[float, float]:
    ci = binomtest(successes, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    # counter-based: the block index occupies the upper counter words
    return np.random.Generator(np.random.Philox(key=int(seed), counter=int(block) << 128))


def robustness_mc(code: GkpCode, noise: NoiseModel, decoder: str, samples: int, seed: int,
                  workers: int = 1, block: int = 8192) -> DecoderReport:
    if samples < 1000:
        raise ValueError("at least 1000 samples are required")
    if decoder not in ("mld", "med"):
        raise ValueError(f"unknown decoder {decoder!r}")
    dim = code.lattice.dim
    sigma = noise.sigma if noise.kind == "gaussian" else None
    per = Periodizer(code.lattice.basis, sigma) if (decoder == "mld" and sigma) else None
    dc = DualCandidates(code) if decoder == "med" else None
    nblocks = -(-samples // block)

    def run(b: int) -> int:
        m = min(block, samples - b * block)
        rng = _block_rng(seed, b)
        if sigma is not None:
            v = rng.standard_normal((m, dim)) * sigma
        else:
            v = rng.random((m, dim)) @ code.lattice.basis.T
        if decoder == "mld":
            err = mld_error_class(code, v, sigma, per)
        else:
            err = med_error_class(code, v, dc)
        return int(np.count_nonzero(err == 0))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            counts = list(ex.map(run, range(nblocks)))
    else:
        counts = [run(b) for b in range(nblocks)]
    succ = sum(counts)
    lo, hi = _wilson(succ, samples)
    bound = lead = None
    if sigma is not None and not code.type.is_trivial():
        bound = fragility_bound(code, sigma)
        lead = fragility_leading(code, sigma)
    return DecoderReport(estimate=succ / samples, ci_low=lo, ci_high=hi, samples_or_grid=samples,
                         decoder=decoder, noise=noise.kind, sigma=sigma, analytic_bound=bound,
                         leading_term=lead, seed=seed, method="mc")


def _fiber_integrals(code: GkpCode, per: Periodizer, grid: int, workers: int) -> Tuple[float, float]:
    """Midpoint-rule integrals over the dual cell of max_k F and sum_k F - max_k F."""
    dim = code.lattice.dim
    _, _, vecs = _coset_setup(code)
    total = grid ** dim
    step = min(max(1, CHUNK_ELEMS // (len(vecs) * per.nterms)), total)
    starts = list(range(0, total, step))
    shape = (grid,) * dim
    bd = code.dual_basis

    def tile(s: int) -> Tuple[float, float]:
        idx = np.arange(s, min(s + step, total))
        t = (np.stack(np.unravel_index(idx, shape), axis=1) + 0.5) / grid
        y = t @ bd.T
        f = np.stack([per.density(y + mv) for mv in vecs], axis=1)
        mx = np.max(f, axis=1)
        return float(np.sum(mx)), float(np.sum(np.sum(f, axis=1) - mx))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(tile, starts))
    else:
        parts = [tile(s) for s in starts]
    cell = abs(float(np.linalg.det(bd)))
    scale = cell / total
    return math.fsum(p[0] for p in parts) * scale, math.fsum(p[1] for p in parts) * scale


def default_quadrature_grid(n: int) -> int:
    return 2000 if n == 1 else 24


def robustness_quadrature(code: GkpCode, sigma: Optional[float] = None, grid: Optional[int] = None,
                          noise: Optional[NoiseModel] = None, workers: int = 1,
                          guard: float = 1e-4) -> DecoderReport:
    """Optimal (MLD) success probability as the dual-cell integral of the fiber max."""
    if noise is None:
        noise = NoiseModel.gaussian(sigma) if sigma is not None else NoiseModel.uniform()
    if code.n > 2:
        raise ValueError("quadrature supports n <= 2")
    grid = grid or default_quadrature_grid(code.n)
    if noise.kind == "uniform":
        est = 1.0 / code.order_K
        return DecoderReport(estimate=est, ci_low=est, ci_high=est, samples_or_grid=grid,
                             decoder="mld", noise="uniform", method="quad")
    s = noise.sigma
    per = Periodizer(code.lattice.basis, s, relative=False)
    _, frag = _fiber_integrals(code, per, grid, workers)
    _, frag_half = _fiber_integrals(code, per, grid // 2, workers)
    est, est_half = 1.0 - frag, 1.0 - frag_half
    if abs(est - est_half) > guard * est:
        raise GridTooCoarse(f"grid {grid} and {grid // 2} disagree: {est} vs {est_half}")
    bound = lead = None
    if not code.type.is_trivial():
        bound = fragility_bound(code, s)
        lead = fragility_leading(code, s)
    return DecoderReport(estimate=est, ci_low=est, ci_high=est, samples_or_grid=grid,
                         decoder="mld", noise="gaussian", sigma=s, analytic_bound=bound,
                         leading_term=lead, method="quad")


def fragility_bound(code: GkpCode, sigma: float, cutoff_radius: Optional[float] = None) -> float:
    """Union bound (2 sigma / sqrt(2 pi)) sum over dual-minus-lattice vectors of
    exp(-|mu|^2 / 8 sigma^2) / |mu|, with a rigorous tail beyond the cutoff."""
    rep = systole_report(code)
    ell = rep.ell
    if cutoff_radius is None:
        cutoff_radius = max(3 * ell, math.sqrt(8 * sigma ** 2 * 60.0))
    if cutoff_radius < 3 * ell * (1 - 1e-12):
        raise ValueError("cutoff radius must be at least three times the systole")
    bd = code.dual_basis
    vecs = enumerate_short(bd.T @ bd, cutoff_radius)
    a = 8 * sigma ** 2
    exact = math.fsum(math.exp(-r2 / a) / math.sqrt(r2) for k, r2 in vecs
                      if not code.dual_in_lattice(k))
    count = len(vecs) + 1
    lam1 = rep.lambda1_dual
    dim = code.lattice.dim
    big_r = cutoff_radius

    def neg_dg(r: float) -> float:
        return math.exp(-r * r / a) * (1 / (r * r) + 2 / a) * (2 * r / lam1 + 1) ** dim

    upper = big_r + math.sqrt(a * 80) + 10 * lam1
    tail_int, _ = integrate.quad(neg_dg, big_r, upper, limit=200, epsabs=0, epsrel=1e-10)
    tail = max(0.0, tail_int - math.exp(-big_r ** 2 / a) / big_r * count)
    return 2 * sigma / math.sqrt(2 * math.pi) * (exact + tail)


def fragility_leading(code: GkpCode, sigma: float) -> float:
    rep = systole_report(code)
    return (2 * rep.count * sigma / (rep.ell * math.sqrt(2 * math.pi))
            * math.exp(-rep.ell ** 2 / (8 * sigma ** 2)))
