"""Dense exact linear algebra over the rationals.

Only what the graph code needs: solving square systems with several
right-hand sides and determinants. Entries are :class:`fractions.Fraction`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


class SingularMatrix(ArithmeticError):
    pass


def _copy(a: Sequence[Sequence[Fraction]]) -> Matrix:
    return [[Fraction(v) for v in row] for row in a]


def solve(a: Sequence[Sequence[Fraction]], rhs: Sequence[Sequence[Fraction]]) -> Matrix:
    """Solve ``a @ X = B`` exactly, where ``B`` is given column-wise.

    ``rhs`` is a list of right-hand-side vectors; the result is the list of
    solution vectors in the same order.
    """
    n = len(a)
    m = _copy(a)
    cols = [list(map(Fraction, b)) for b in rhs]
    if any(len(row) != n for row in m) or any(len(b) != n for b in cols):
        raise ValueError("dimension mismatch")
    k = len(cols)
    # augmented rows: coefficient part then one entry per right-hand side
    aug = [m[i] + [cols[j][i] for j in range(k)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            raise SingularMatrix(f"matrix is singular (column {c})")
        if piv != c:
            aug[c], aug[piv] = aug[piv], aug[c]
        prow = aug[c]
        inv = 1 / prow[c]
        for r in range(n):
            if r == c:
                continue
            factor = aug[r][c]
            if factor == 0:
                continue
            factor *= inv
            row = aug[r]
            for j in range(c, n + k):
                if prow[j]:
                    row[j] -= factor * prow[j]
    return [[aug[i][n + j] / aug[i][i] for i in range(n)] for j in range(k)]


def determinant(a: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(a)
    if n == 0:
        return Fraction(1)
    m = _copy(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            factor = m[r][c] * inv
            if factor:
                for j in range(c, n):
                    m[r][j] -= factor * m[c][j]
    return det
