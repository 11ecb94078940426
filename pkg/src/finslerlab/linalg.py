"""Small dense linear algebra over generic scalars (floats or jets).

Charts here have n <= 4, so plain Gaussian elimination with partial
pivoting is both fast enough and exact modulo rounding.  Pivots are
chosen by the magnitude of the standard part, which keeps the pivot
sequence identical between a float evaluation and a jet evaluation of
the same matrix.
"""

from __future__ import annotations

from .jets import standard_part


class SingularMatrixError(ZeroDivisionError):
    """Matrix with a (numerically) vanishing pivot."""


def det(matrix) -> object:
    """Determinant via LU with partial pivoting; scalar type follows entries."""
    n = len(matrix)
    a = [list(row) for row in matrix]
    sign = 1.0
    result = 1.0
    for col in range(n):
        pivot_row = max(range(col, n), key=lambda r: abs(standard_part(a[r][col])))
        if abs(standard_part(a[pivot_row][col])) == 0.0:
            return 0.0 * result
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            sign = -sign
        pivot = a[col][col]
        result = result * pivot
        for r in range(col + 1, n):
            factor = a[r][col] / pivot
            for c in range(col + 1, n):
                a[r][c] = a[r][c] - factor * a[col][c]
    return sign * result


def inv(matrix) -> list:
    """Inverse via Gauss-Jordan; raises SingularMatrixError on rank loss."""
    n = len(matrix)
    a = [list(row) for row in matrix]
    b = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot_row = max(range(col, n), key=lambda r: abs(standard_part(a[r][col])))
        if abs(standard_part(a[pivot_row][col])) == 0.0:
            raise SingularMatrixError(f"singular matrix (pivot column {col})")
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            b[col], b[pivot_row] = b[pivot_row], b[col]
        pivot = a[col][col]
        for c in range(n):
            a[col][c] = a[col][c] / pivot
            b[col][c] = b[col][c] / pivot
        for r in range(n):
            if r == col:
                continue
            factor = a[r][col]
            if isinstance(factor, float) and factor == 0.0:
                continue
            for c in range(n):
                a[r][c] = a[r][c] - factor * a[col][c]
                b[r][c] = b[r][c] - factor * b[col][c]
    return b


def matvec(matrix, vector) -> list:
    return [
        sum_(row[j] * vector[j] for j in range(len(vector))) for row in matrix
    ]


def dot(u, v):
    return sum_(a * b for a, b in zip(u, v))


def sum_(terms):
    """Left-to-right sum without a float 0 start (keeps jet types clean)."""
    total = None
    for t in terms:
        total = t if total is None else total + t
    return 0.0 if total is None else total
