"""Canonical example codes, built from closed-form bases and validated at load."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from .errors import InputError
from .gkpcode import GkpCode
from .symplattice import lattice_from_basis


@dataclass(frozen=True)
class GalleryEntry:
    id: str
    description: str
    code: GkpCode


def square_basis(d: int) -> np.ndarray:
    return math.sqrt(d) * np.eye(2)


def hex_basis(d: int) -> np.ndarray:
    # covolume d, so E(s1, s2) = d
    a = math.sqrt(2 * d / math.sqrt(3))
    return np.array([[a, a / 2], [0.0, a * math.sqrt(3) / 2]])


# D4 = {x in Z^4 : sum even} scaled by 2^(-1/4), written in coordinates where the
# complex structure preserving it is the standard one; symplectic Gram has type (1,1).
_D4_GENERATORS = np.array([[1, 1, 0, 0], [1, -1, 1, 0], [0, 0, -1, 1], [0, 0, 0, -1]], dtype=float)
_D4_FRAME = np.array([
    [1.0, 0.0, 0.0, 0.0],
    [0.0, -math.sqrt(0.5), -math.sqrt(0.5), 0.0],
    [0.0, math.sqrt(0.5), -math.sqrt(0.5), 0.0],
    [0.0, 0.0, 0.0, -1.0],
])
D4_BASIS = 2 ** -0.25 * _D4_FRAME @ _D4_GENERATORS


def d4_basis(d: int) -> np.ndarray:
    return math.sqrt(d) * D4_BASIS


def generic_basis() -> np.ndarray:
    # no symmetry beyond -1
    return np.array([[1.3, 0.41], [0.17, 0.82]]) * math.sqrt(2 / (1.3 * 0.82 - 0.41 * 0.17))


_BUILDERS: Dict[str, tuple] = {
    "square-d2": ("square lattice, one qubit", lambda: square_basis(2)),
    "square-d3": ("square lattice, one qutrit", lambda: square_basis(3)),
    "hex-d2": ("hexagonal lattice, one qubit", lambda: hex_basis(2)),
    "hex-d3": ("hexagonal lattice, one qutrit", lambda: hex_basis(3)),
    "d4-d2": ("D4 lattice scaled to type (2,2), two qubits", lambda: d4_basis(2)),
    "generic-d2": ("asymmetric 2D lattice of type (2)", generic_basis),
}


def gallery_ids() -> List[str]:
    return list(_BUILDERS)


def gallery_entry(gid: str) -> GalleryEntry:
    if gid not in _BUILDERS:
        raise InputError(f"unknown gallery id {gid!r}; known: {', '.join(_BUILDERS)}")
    desc, build = _BUILDERS[gid]
    return GalleryEntry(id=gid, description=desc, code=GkpCode.from_lattice(lattice_from_basis(build())))


def gallery_code(gid: str) -> GkpCode:
    return gallery_entry(gid).code
