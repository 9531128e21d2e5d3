"""Exact linear algebra over N = Z^4 and its dual M.

Everything here works with Python ints and :class:`fractions.Fraction`;
no floating point is ever used.  Besides the 4x4 operations needed for
smooth fans the module carries a few small rational matrix helpers
(rank, row reduction, kernels) shared by the Picard and Chow code.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Sequence

Vector = tuple[int, ...]
DualVector = tuple[Fraction, ...]

DIM = 4


class NotABasis(ValueError):
    """The given vectors are not a Z-basis of the lattice."""


def as_vector(v: Sequence[int]) -> Vector:
    out = tuple(int(x) for x in v)
    if len(out) != DIM:
        raise ValueError(f"expected {DIM} coordinates, got {len(out)}")
    return out


def is_primitive(v: Sequence[int]) -> bool:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g == 1


def pairing(m: Sequence, v: Sequence) -> Fraction | int:
    return sum(a * b for a, b in zip(m, v))


def add(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def scale(c, v: Sequence) -> tuple:
    return tuple(c * a for a in v)


def determinant(rows: Sequence[Sequence]) -> int | Fraction:
    """Exact determinant of a square matrix (Bareiss fraction-free elimination)."""
    a = [list(r) for r in rows]
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("matrix is not square")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                # Bareiss division is exact for integer input.
                if isinstance(num, int) and isinstance(prev, int):
                    a[i][j] = num // prev
                else:
                    a[i][j] = Fraction(num) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det4(v1, v2, v3, v4) -> int:
    return determinant([v1, v2, v3, v4])


def is_unimodular_basis(vs: Sequence[Sequence[int]]) -> bool:
    if len(vs) != DIM:
        return False
    return abs(determinant(vs)) == 1


def inverse(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    """Inverse of a square rational matrix by Gauss-Jordan elimination."""
    n = len(rows)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise NotABasis("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def dual_basis(vs: Sequence[Sequence[int]]) -> list[DualVector]:
    """The dual basis {x_1^*, ..., x_4^*} of M with <x_i^*, x_j> = delta_ij.

    The duals are the columns of the inverse of the matrix whose rows are
    the x_j.  For a unimodular basis they are integral; this is asserted.
    """
    if not is_unimodular_basis(vs):
        raise NotABasis(f"{list(vs)} is not a unimodular basis")
    inv = inverse(vs)
    duals = [tuple(inv[r][c] for r in range(DIM)) for c in range(DIM)]
    assert all(x.denominator == 1 for d in duals for x in d)
    return duals


def express_in_basis(v: Sequence[int], basis: Sequence[Sequence[int]]) -> Vector:
    """Integer coefficients c with v = sum c_i basis_i."""
    duals = dual_basis(basis)
    return tuple(int(pairing(d, v)) for d in duals)


def primitive_integer(v: Sequence) -> Vector:
    """Smallest positive integer multiple of a rational vector, made primitive."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


# -- small rational matrix helpers ---------------------------------------

def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        pr = [x / p for x in a[r]]
        a[r] = pr
        nz = [j for j in range(c, ncols) if pr[j] != 0]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                row = a[i]
                for j in nz:
                    row[j] -= f * pr[j]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


class RowSpace:
    """Incrementally maintained echelon basis for independence tests."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []

    def reduce(self, row: Sequence) -> list[Fraction]:
        v = [Fraction(x) for x in row]
        for b, p in zip(self.rows, self.pivots):
            if v[p] != 0:
                f = v[p]
                for j in range(p, self.ncols):
                    if b[j] != 0:
                        v[j] -= f * b[j]
        return v

    def add(self, row: Sequence) -> bool:
        """Insert ``row`` if it is independent of the rows so far."""
        v = self.reduce(row)
        p = next((j for j, x in enumerate(v) if x != 0), None)
        if p is None:
            return False
        v = [x / v[p] for x in v]
        self.rows.append(v)
        self.pivots.append(p)
        return True

    def __len__(self):
        return len(self.rows)


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def kernel(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : A x = 0}."""
    if ncols is None:
        ncols = len(rows[0])
    red, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(x)
    return basis


def solve_combination(rows: Sequence[Sequence], target: Sequence) -> list[Fraction] | None:
    """Coefficients c with sum c_i rows[i] == target, or None."""
    if not rows:
        return [] if all(x == 0 for x in target) else None
    ncols = len(rows)
    # Transpose: unknowns are the coefficients.
    aug = [[Fraction(rows[i][j]) for i in range(ncols)] + [Fraction(target[j])]
           for j in range(len(target))]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    c = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        c[p] = row[ncols]
    return c


def maximal_minor_gcd(rows: Sequence[Sequence[int]], k: int) -> int:
    """gcd of all k x k minors of an integer matrix with k columns."""
    g = 0
    for sel in combinations(range(len(rows)), k):
        g = gcd(g, int(determinant([rows[i] for i in sel])))
        if g == 1:
            break
    return g
