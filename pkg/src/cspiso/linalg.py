"""Small exact linear algebra helpers: incremental echelon bases, rank, and
linear solving over the rational / Gaussian-rational scalars."""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .algebra import Scalar, scalar_inverse


class EchelonBasis:
    """Incremental row space in reduced echelon form (exact arithmetic)."""

    def __init__(self):
        self.pivots: List[int] = []
        self.rows: List[List[Scalar]] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vector: Sequence[Scalar]) -> List[Scalar]:
        v = list(vector)
        for pivot, row in zip(self.pivots, self.rows):
            c = v[pivot]
            if c != 0:
                for idx in range(len(v)):
                    if row[idx] != 0:
                        v[idx] = v[idx] - c * row[idx]
        return v

    def contains(self, vector: Sequence[Scalar]) -> bool:
        return all(x == 0 for x in self.reduce(vector))

    def insert(self, vector: Sequence[Scalar]) -> bool:
        """Add the vector to the span; returns True if it was independent."""
        v = self.reduce(vector)
        pivot = next((i for i, x in enumerate(v) if x != 0), None)
        if pivot is None:
            return False
        inv = scalar_inverse(v[pivot])
        v = [x * inv for x in v]
        for row in self.rows:
            c = row[pivot]
            if c != 0:
                for idx in range(len(v)):
                    if v[idx] != 0:
                        row[idx] = row[idx] - c * v[idx]
        self.pivots.append(pivot)
        self.rows.append(v)
        return True


def rank(vectors: Sequence[Sequence[Scalar]]) -> int:
    basis = EchelonBasis()
    for v in vectors:
        basis.insert(v)
    return basis.rank


def solve(matrix: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]) -> Optional[List[Scalar]]:
    """One exact solution of ``matrix @ x = rhs`` or None if inconsistent.

    Free variables are set to zero.  Intended for small systems in tests.
    """
    m = len(matrix)
    if m == 0:
        return []
    n = len(matrix[0])
    rows = [list(matrix[i]) + [rhs[i]] for i in range(m)]
    pivots: List[Tuple[int, int]] = []
    r = 0
    for c in range(n):
        pivot_row = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = scalar_inverse(rows[r][c])
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append((r, c))
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if rows[i][n] != 0:
            return None
    solution: List[Scalar] = [0] * n
    for row_idx, col_idx in pivots:
        solution[col_idx] = rows[row_idx][n]
    return solution
