"""Small dense matrices of Novikov series (lists of rows)."""

from __future__ import annotations

from typing import List, Sequence

from .errors import NonUnitDivisor
from .series import NovikovSeries

Matrix = List[List[NovikovSeries]]


def zeros(n: int, m: int, reg, order, weights=(1,)) -> Matrix:
    return [[NovikovSeries.zero(reg, order, weights) for _ in range(m)] for _ in range(n)]


def identity(n: int, reg, order, weights=(1,)) -> Matrix:
    return [[NovikovSeries.constant(reg, 1 if i == j else 0, order, weights) for j in range(n)]
            for i in range(n)]


def from_constants(rows, reg, order, weights=(1,)) -> Matrix:
    return [[NovikovSeries.constant(reg, c, order, weights) for c in row] for row in rows]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for l in range(k):
                t = a[i][l] * b[l][j]
                acc = t if acc is None else acc + t
            row.append(acc)
        out.append(row)
    return out


def mat_vec(a: Matrix, v: Sequence[NovikovSeries]) -> List[NovikovSeries]:
    return [col[0] for col in mat_mul(a, [[x] for x in v])]


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, c) -> Matrix:
    return [[x * c for x in row] for row in a]


def mat_map(a: Matrix, f) -> Matrix:
    return [[f(x) for x in row] for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(r) for r in zip(*a)]


def mat_agrees(a: Matrix, b: Matrix) -> bool:
    return all(x.agrees(y) for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def is_zero(a: Matrix) -> bool:
    return all(x.is_zero() for row in a for x in row)


def first_nonzero(a: Matrix):
    for i, row in enumerate(a):
        for j, x in enumerate(row):
            if not x.is_zero():
                return i, j, x
    return None


def det(a: Matrix) -> NovikovSeries:
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    acc = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        t = a[0][j] * det(minor)
        if j % 2:
            t = -t
        acc = t if acc is None else acc + t
    return acc


def mat_inv(a: Matrix, allow_shift: bool = False) -> Matrix:
    """Inverse by the adjugate formula; the determinant must be invertible."""
    n = len(a)
    d = det(a)
    try:
        dinv = d.inverse(allow_shift=allow_shift)
    except NonUnitDivisor:
        raise NonUnitDivisor("matrix determinant is not invertible") from None
    if n == 1:
        return [[dinv]]
    cof = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [r[:j] + r[j + 1:] for k, r in enumerate(a) if k != i]
            c = det(minor)
            row.append(-c if (i + j) % 2 else c)
        cof.append(row)
    return [[cof[j][i] * dinv for j in range(n)] for i in range(n)]
