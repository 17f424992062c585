"""Exact dense linear algebra over rationals.

Matrices are lists of lists of ``fractions.Fraction``; vectors are lists.
Everything here is pure and allocation-happy, which is fine at desk scale.
Determinants use fraction-free Bareiss elimination on a row-scaled integer
copy to keep intermediate coefficients small.
"""

from fractions import Fraction
from math import lcm


def to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point input rejected; pass int, str or Fraction")
    return Fraction(x)


def mat(rows):
    return [[to_fraction(x) for x in row] for row in rows]


def vec(entries):
    return [to_fraction(x) for x in entries]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(col) for col in zip(*a)]


def mat_mul(a, b):
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def vec_sub(u, v):
    return [x - y for x, y in zip(u, v)]


def vec_add(u, v):
    return [x + y for x, y in zip(u, v)]


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def det(a):
    """Determinant by Bareiss elimination after clearing denominators rowwise."""
    n = len(a)
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    m = []
    for row in a:
        if len(row) != n:
            raise ValueError("determinant of a non-square matrix")
        mult = lcm(*(x.denominator for x in row)) if row else 1
        scale *= mult
        m.append([int(x * mult) for x in row])
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return Fraction(sign * m[n - 1][n - 1], 1) / scale


def solve(a, b):
    """Solve a x = b exactly, or return None when a is singular.

    ``b`` may be a vector or a matrix of stacked right-hand-side columns.
    """
    n = len(a)
    rhs_is_vec = b and not isinstance(b[0], list)
    rhs = [[x] for x in b] if rhs_is_vec else [row[:] for row in b]
    work = [row[:] + rhs[i] for i, row in enumerate(a)]
    width = n + len(rhs[0]) if rhs else n
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if work[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            return None
        work[col], work[pivot] = work[pivot], work[col]
        pv = work[col][col]
        work[col] = [x / pv for x in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    sol = [row[n:width] for row in work]
    if rhs_is_vec:
        return [row[0] for row in sol]
    return sol


def inverse(a):
    return solve(a, identity(len(a)))


def is_nonsingular(a):
    return det(a) != 0
