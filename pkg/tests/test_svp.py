import itertools
import math

import numpy as np
import pytest

from abelgkp.errors import TrivialCode
from abelgkp.gallery import gallery_code
from abelgkp.gkpcode import GkpCode
from abelgkp.svp import closest_vector, enumerate_ball, enumerate_short, lll_reduce, systole_report
from abelgkp.symplattice import lattice_from_basis, symplectic_form


def brute_force_systole(code, box):
    """Minimum norm and count over dual-minus-lattice vectors in a coordinate box,
    using the dual basis inv(B^T J) built independently of the library."""
    b = code.lattice.basis
    dual = np.linalg.inv(b.T @ symplectic_form(code.n))
    binv = np.linalg.inv(b)
    best, count = math.inf, 0
    for c in itertools.product(range(-box, box + 1), repeat=b.shape[0]):
        if not any(c):
            continue
        v = dual @ np.array(c, dtype=float)
        x = binv @ v
        if np.max(np.abs(x - np.rint(x))) < 1e-9:
            continue
        r = float(np.linalg.norm(v))
        if r < best * (1 - 1e-9):
            best, count = r, 1
        elif r <= best * (1 + 1e-9):
            count += 1
    return best, count


@pytest.mark.parametrize("gid,ell,count", [
    ("square-d2", 2 ** -0.5, 4),
    ("hex-d2", 3 ** -0.25, 6),
    ("square-d3", 3 ** -0.5, 4),
    ("generic-d2", None, 2),
])
def test_systole_against_oracle(gid, ell, count):
    code = gallery_code(gid)
    rep = systole_report(code)
    ob, oc = brute_force_systole(code, 5)
    assert rep.ell == pytest.approx(ob, abs=1e-12)
    assert rep.count == oc == count
    if ell is not None:
        assert rep.ell == pytest.approx(ell, abs=1e-9)
    assert np.allclose(np.linalg.norm(rep.minimizer_vectors, axis=1), rep.ell)


def test_d4_systole_against_oracle():
    code = gallery_code("d4-d2")
    rep = systole_report(code)
    ob, oc = brute_force_systole(code, 2)
    assert code.divisors == (2, 2)
    assert (rep.count, oc) == (24, 24)
    assert rep.ell == pytest.approx(ob, abs=1e-12)


def test_systole_lattice_minima():
    rep = systole_report(gallery_code("square-d2"))
    assert rep.lambda1_lattice == pytest.approx(math.sqrt(2))
    assert rep.lambda1_dual == pytest.approx(math.sqrt(0.5))


def test_trivial_code_has_no_systole():
    with pytest.raises(TrivialCode):
        systole_report(GkpCode.from_lattice(lattice_from_basis(np.eye(2))))


def test_lll_reduces_skewed_gram():
    b = np.array([[1.0, 17.0], [0.0, 1.0]])
    t, g = lll_reduce(b.T @ b)
    assert abs(round(np.linalg.det(t))) == 1
    assert np.allclose(t.T @ b.T @ b @ t, g)
    assert max(np.diag(g)) < 1.5


def test_enumerate_short_symmetric_and_sorted():
    vecs = enumerate_short(np.eye(2) * 2.0, 2.0)
    coords = [c for c, _ in vecs]
    assert len(vecs) == 4 + 4
    assert all(tuple(-x for x in c) in coords for c in coords)
    assert [r for _, r in vecs] == sorted(r for _, r in vecs)


def test_enumerate_ball_around_center():
    pts = enumerate_ball(np.eye(2), [0.5, 0.5], 0.75)
    assert sorted(c for c, _ in pts) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_closest_vector_tie_break_is_lexicographic():
    coords, vec = closest_vector(np.eye(2), [0.5, 0.0])
    assert coords == (0, 0)
    coords, vec = closest_vector(np.eye(2), [-0.5, 2.5])
    assert coords == (-1, 2)
    coords, vec = closest_vector(np.array([[2.0, 1.0], [0.0, 3.0]]), [2.9, 3.2])
    assert np.allclose(vec, [3.0, 3.0])
