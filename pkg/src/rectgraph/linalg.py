"""Exact linear algebra over Q and Z.

Matrices are lists of rows. Entries are ints or Fractions; nothing here
ever rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Optional, Sequence

Matrix = Sequence[Sequence]


def to_fractions(matrix: Matrix) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in matrix]


def rref(matrix: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    rows = to_fractions(matrix)
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(matrix: Matrix) -> int:
    if not matrix:
        return 0
    return len(rref(matrix)[1])


def nullspace(matrix: Matrix, ncols: Optional[int] = None) -> list[list[Fraction]]:
    """Basis of {x : matrix @ x = 0}."""
    if not matrix:
        if ncols is None:
            raise ValueError("column count needed for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    reduced, pivots = rref(matrix)
    ncols = len(reduced[0])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            vec[p] = -row[f]
        basis.append(vec)
    return basis


def left_nullspace(matrix: Matrix) -> list[list[Fraction]]:
    """Basis of {y : y @ matrix = 0}."""
    if not matrix:
        return []
    return nullspace(transpose(matrix))


def transpose(matrix: Matrix) -> list[list]:
    return [list(col) for col in zip(*matrix)]


def mat_vec(matrix: Matrix, vec: Sequence) -> list:
    return [sum((a * b for a, b in zip(row, vec)), Fraction(0)) for row in matrix]


def vec_mat(vec: Sequence, matrix: Matrix) -> list:
    if not matrix:
        return []
    return [sum((v * row[c] for v, row in zip(vec, matrix)), Fraction(0)) for c in range(len(matrix[0]))]


def determinant(matrix: Matrix) -> Fraction:
    rows = to_fractions(matrix)
    n = len(rows)
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            det = -det
        det *= rows[c][c]
        for i in range(c + 1, n):
            f = rows[i][c] / rows[c][c]
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return det


@dataclass(frozen=True)
class AffineSolution:
    """Solutions of A x = b written as particular + span(directions)."""

    particular: tuple[Fraction, ...]
    directions: tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class Inconsistent:
    """Certificate y with y A = 0 and y b = residual != 0."""

    combination: tuple[Fraction, ...]
    residual: Fraction


def solve_affine(matrix: Matrix, rhs: Sequence, ncols: int) -> AffineSolution | Inconsistent:
    """Solve A x = b exactly, or return a left certificate of inconsistency."""
    if not matrix:
        return AffineSolution(
            tuple(Fraction(0) for _ in range(ncols)),
            tuple(tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)),
        )
    nrows = len(matrix)
    augmented = [
        [Fraction(x) for x in row] + [Fraction(b)] + [Fraction(int(i == k)) for k in range(nrows)]
        for i, (row, b) in enumerate(zip(matrix, rhs))
    ]
    reduced, pivots = rref(augmented)
    for row in reduced:
        if all(x == 0 for x in row[:ncols]) and row[ncols] != 0:
            combo = tuple(row[ncols + 1:])
            return Inconsistent(combo, sum((y * Fraction(b) for y, b in zip(combo, rhs)), Fraction(0)))
    x = [Fraction(0)] * ncols
    for row, p in zip(reduced, pivots):
        if p < ncols:
            x[p] = row[ncols]
    return AffineSolution(tuple(x), tuple(tuple(v) for v in nullspace(matrix)))


def integer_kernel(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Basis of the integer relations {n : sum n_i vectors[i] = 0}.

    Unimodular row reduction of [vectors | I]; rows whose left block
    vanishes span the relation lattice. The basis is returned in Hermite
    normal form so it is deterministic.
    """
    k = len(vectors)
    if k == 0:
        return []
    width = len(vectors[0])
    rows = [list(map(int, v)) + [int(i == j) for j in range(k)] for i, v in enumerate(vectors)]
    r = 0
    for c in range(width):
        r = _euclid_column(rows, r, c)
    kernel = [row[width:] for row in rows[r:]]
    return [tuple(v) for v in hermite_normal_form(kernel)]


def _euclid_column(rows: list[list[int]], start: int, col: int) -> int:
    """Clear column col below row start with unimodular operations."""
    while True:
        nonzero = [i for i in range(start, len(rows)) if rows[i][col] != 0]
        if not nonzero:
            return start
        best = min(nonzero, key=lambda i: abs(rows[i][col]))
        rows[start], rows[best] = rows[best], rows[start]
        done = True
        for i in range(start + 1, len(rows)):
            if rows[i][col]:
                q = rows[i][col] // rows[start][col]
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[start])]
                if rows[i][col]:
                    done = False
        if done:
            return start + 1


def hermite_normal_form(vectors: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style HNF of the lattice spanned by vectors (zero rows dropped)."""
    rows = [list(map(int, v)) for v in vectors]
    if not rows:
        return []
    width = len(rows[0])
    r = 0
    pivots = []
    for c in range(width):
        nr = _euclid_column(rows, r, c)
        if nr > r:
            if rows[r][c] < 0:
                rows[r] = [-x for x in rows[r]]
            pivots.append((r, c))
            r = nr
    for pr, pc in pivots:
        for i in range(pr):
            q = rows[i][pc] // rows[pr][pc]
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[pr])]
    return rows[:r]


def lattice_index(vectors: Sequence[Sequence[int]]) -> int:
    """Index of the lattice spanned by vectors inside its saturation.

    Equal to the gcd of the maximal nonzero minors of the (independent) HNF basis.
    """
    basis = hermite_normal_form(vectors)
    if not basis:
        return 1
    k = len(basis)
    g = 0
    for cols in combinations(range(len(basis[0])), k):
        minor = determinant([[row[c] for c in cols] for row in basis])
        g = gcd(g, int(minor))
    return abs(g)
