"""Exact integer and rational matrix helpers (lists of lists of int/Fraction)."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import List, Sequence, Tuple

Matrix = List[List]


def as_int_matrix(a) -> List[List[int]]:
    return [[int(x) for x in row] for row in a]


def identity(n: int) -> List[List[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def inverse(a: Sequence[Sequence]) -> List[List[Fraction]]:
    """Exact inverse by Gauss-Jordan over the rationals."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        m[c] = [x / p for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def det(a: Sequence[Sequence]) -> Fraction:
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        out *= m[c][c]
        for r in range(c + 1, n):
            if m[r][c] != 0:
                f = m[r][c] / m[c][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return out


def is_integral(a: Sequence[Sequence]) -> bool:
    return all(Fraction(x).denominator == 1 for row in a for x in row)


def hnf_columns(a: Sequence[Sequence[int]]) -> Tuple[List[List[int]], List[List[int]], int]:
    """Column Hermite form: returns (H, V, r) with A V = H, V unimodular.

    The first r columns of H are a basis of the column lattice of A in echelon
    form; the remaining columns are zero, so V[:, r:] spans the integer kernel.
    """
    m = len(a)
    k = len(a[0]) if m else 0
    h = [[int(x) for x in row] for row in a]
    v = identity(k)

    def colop(dst: int, src: int, q: int) -> None:
        for mat in (h, v):
            for row in mat:
                row[dst] -= q * row[src]

    def swap(i: int, j: int) -> None:
        for mat in (h, v):
            for row in mat:
                row[i], row[j] = row[j], row[i]

    def negate(j: int) -> None:
        for mat in (h, v):
            for row in mat:
                row[j] = -row[j]

    p = 0
    for i in range(m):
        if p >= k:
            break
        while True:
            nz = [j for j in range(p, k) if h[i][j] != 0]
            if not nz:
                break
            j0 = min(nz, key=lambda j: (abs(h[i][j]), j))
            if j0 != p:
                swap(p, j0)
            done = True
            for j in range(p + 1, k):
                if h[i][j] != 0:
                    colop(j, p, h[i][j] // h[i][p])
                    if h[i][j] != 0:
                        done = False
            if done:
                break
        if h[i][p] == 0:
            continue
        if h[i][p] < 0:
            negate(p)
        for j in range(p):
            colop(j, p, h[i][j] // h[i][p])
        p += 1
    return h, v, p


def integer_kernel(a: Sequence[Sequence[int]]) -> List[List[int]]:
    """Basis of {x in Z^k : A x = 0}."""
    _, v, r = hnf_columns(a)
    k = len(v)
    return [[v[row][j] for row in range(k)] for j in range(r, k)]


def smith_invariants(a: Sequence[Sequence[int]]) -> List[int]:
    """Nonzero invariant factors d1 | d2 | ... of an integer matrix."""
    m = [[int(x) for x in row] for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    out: List[int] = []
    t = 0
    while t < min(rows, cols):
        nz = [(abs(m[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if m[i][j] != 0]
        if not nz:
            break
        _, i0, j0 = min(nz)
        m[t], m[i0] = m[i0], m[t]
        for row in m:
            row[t], row[j0] = row[j0], row[t]
        while True:
            clean = True
            for i in range(t + 1, rows):
                q = m[i][t] // m[t][t]
                if q:
                    m[i] = [x - q * y for x, y in zip(m[i], m[t])]
                if m[i][t] != 0:
                    clean = False
            for j in range(t + 1, cols):
                q = m[t][j] // m[t][t]
                if q:
                    for row in m:
                        row[j] -= q * row[t]
                if m[t][j] != 0:
                    clean = False
            if clean:
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if m[i][j] % m[t][t] != 0), None)
                if bad is None:
                    break
                m[t] = [x + y for x, y in zip(m[t], m[bad[0]])]
                continue
            nz = [(abs(m[i][j]), i, j) for i in range(t, rows) for j in range(t, cols)
                  if m[i][j] != 0 and (i == t or j == t)]
            _, i0, j0 = min(nz)
            m[t], m[i0] = m[i0], m[t]
            for row in m:
                row[t], row[j0] = row[j0], row[t]
        out.append(abs(m[t][t]))
        t += 1
    return out


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b
