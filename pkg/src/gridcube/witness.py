"""Hidden Z / hidden K witnesses.

A hidden Z witness of a block matrix M is a tuple (X, Y, r, s) with X
square Z, Y block Z, MX = Y, and X^T r + Y^T s > 0 for nonnegative r, s.
A proper hidden K witness is the special case where the extended matrix
[MX|X] has strictly positive row sums; it certifies the hidden K property
without any further LP solve. The minimum-factor witness is computed by
an exact LP over the entries of X and the factor.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import core, exactlp, linalg
from .errors import DimensionError, PreconditionError


@dataclass(frozen=True)
class HiddenZWitness:
    x: tuple  # n x n
    y: core.BlockMatrix
    r: tuple  # length n, >= 0
    s: tuple  # length m, >= 0

    @staticmethod
    def of(x, y, r, s):
        return HiddenZWitness(
            tuple(tuple(linalg.to_fraction(v) for v in row) for row in x),
            y if isinstance(y, core.BlockMatrix) else core.BlockMatrix(y),
            tuple(linalg.to_fraction(v) for v in r),
            tuple(linalg.to_fraction(v) for v in s),
        )


def _is_square_z(x):
    return all(v <= 0 for i, row in enumerate(x) for k, v in enumerate(row) if k != i)


def _mx(M, x):
    """The block matrix MX for square X."""
    xt = linalg.transpose([list(r) for r in x])
    return core.BlockMatrix(
        [
            [[linalg.dot(row, col) for col in xt] for row in block]
            for block in M.blocks
        ]
    )


def verify_hidden_z(M, w):
    """Exact check of all four witness clauses."""
    x = [list(r) for r in w.x]
    if len(x) != M.n or any(len(r) != M.n for r in x):
        raise DimensionError("X must be square of order n")
    if w.y.b != M.b or len(w.r) != M.n or len(w.s) != M.m:
        raise DimensionError("witness dimensions do not match M")
    if any(v < 0 for v in w.r) or any(v < 0 for v in w.s):
        return False
    if not _is_square_z(x):
        return False
    if not core.is_z_matrix(w.y):
        return False
    if _mx(M, x) != w.y:
        return False
    xt_r = linalg.mat_vec(linalg.transpose(x), list(w.r))
    yt_s = linalg.mat_vec(linalg.transpose(w.y.flat_rows()), list(w.s))
    return all(a + b > 0 for a, b in zip(xt_r, yt_s))


def verify_proper(M, x):
    """X Z, MX Z, and every row sum of [MX|X] strictly positive."""
    x = linalg.mat(x)
    if len(x) != M.n or any(len(r) != M.n for r in x):
        raise DimensionError("X must be square of order n")
    if not _is_square_z(x):
        return False
    y = _mx(M, x)
    if not core.is_z_matrix(y):
        return False
    if any(sum(row) <= 0 for row in x):
        return False
    return all(sum(row) > 0 for _, _, row in y.rows())


def rescale_witness(w, d):
    """Column-rescaled witness (XD, YD, r, s) for positive d."""
    d = linalg.vec(d)
    if any(v <= 0 for v in d):
        raise PreconditionError("rescaling vector must be strictly positive")
    x = [[v * dk for v, dk in zip(row, d)] for row in w.x]
    y = core.BlockMatrix(
        [[[v * dk for v, dk in zip(row, d)] for row in block] for block in w.y.blocks]
    )
    return HiddenZWitness.of(x, y, w.r, w.s)


def min_factor_lp(M):
    """The exact LP over (X, gamma) minimizing the stochastic factor.

    Entrywise, [MX|X] is constrained to the 0/1 pattern of E(b+1)
    (diagonal-column entries at most 1, all others at most 0) and every
    row sum of [MX|X] must be at least 1 - gamma.
    """
    n = M.n
    lp = exactlp.LinearProgram(direction="min")
    xvar = [[lp.add_var(0, nonneg=False) for _ in range(n)] for _ in range(n)]
    gamma = lp.add_var(1, nonneg=True)
    nvars = n * n + 1
    zero = [Fraction(0)] * nvars

    def mx_coeffs(row, l):
        # (MX)_{row,l} = sum_k row[k] * x[k][l]
        coeffs = zero[:]
        for k, c in enumerate(row):
            coeffs[xvar[k][l]] = c
        return coeffs

    for j, _, row in M.rows():
        rowsum = zero[:]
        for l in range(n):
            coeffs = mx_coeffs(row, l)
            lp.add_row(coeffs, exactlp.LE, 1 if l == j else 0)
            for idx, c in enumerate(coeffs):
                rowsum[idx] += c
        rowsum[gamma] = Fraction(1)
        lp.add_row(rowsum, exactlp.GE, 1)
    for j in range(n):
        rowsum = zero[:]
        for l in range(n):
            coeffs = zero[:]
            coeffs[xvar[j][l]] = Fraction(1)
            lp.add_row(coeffs, exactlp.LE, 1 if l == j else 0)
            rowsum[xvar[j][l]] = Fraction(1)
        rowsum[gamma] = Fraction(1)
        lp.add_row(rowsum, exactlp.GE, 1)
    return lp, xvar, gamma


def compute_min_factor_witness(M):
    """Minimum-factor proper witness (gamma*, X*), or None when not hidden K.

    The LP is always feasible (X = 0 with gamma = 1), so the negative
    outcome is exactly an optimal factor of at least 1.
    """
    lp, xvar, gamma = min_factor_lp(M)
    out = exactlp.solve(lp)
    assert out.status == "optimal"
    g = out.x[gamma]
    if g >= 1:
        return None
    x = [[out.x[xvar[j][l]] for l in range(M.n)] for j in range(M.n)]
    assert verify_proper(M, x)
    return g, x


def is_hidden_k(M):
    """Proper witness X, or None; asserts [MX|X] is a K-matrix on success."""
    res = compute_min_factor_witness(M)
    if res is None:
        return None
    _, x = res
    assert core.is_k_matrix(extend_with_witness(M, x))
    return x


def extend_with_witness(M, x):
    """[Y|X]: each block of Y = MX extended by the matching row of X."""
    x = linalg.mat(x)
    y = _mx(M, x)
    return core.BlockMatrix(
        [list(block) + [tuple(x[j])] for j, block in enumerate(y.blocks)]
    )


def witness_stochastic_form(M, x):
    """Diagonal L, H such that [L(MX) | H^{-1}X] is stochastic K.

    Row sums of [MX|X] are equalized to a constant, then everything is
    normalized by the largest diagonal-column entry t, giving factor
    (t - c)/t. LMH is again hidden K with proper witness (H^{-1}X, LMX).
    """
    if not verify_proper(M, x):
        raise PreconditionError("X is not a proper hidden K witness of M")
    x = linalg.mat(x)
    y = _mx(M, x)
    n = M.n
    y_sums = [sum(row) for _, _, row in y.rows()]
    x_sums = [sum(row) for row in x]
    # First pass: row sums c = 1, then rescale by the max diagonal t.
    l0 = [Fraction(1) / s for s in y_sums]
    h0inv = [Fraction(1) / s for s in x_sums]
    t = max(
        max(l0[core.flat_index(M.b, j, i)] * y.entry(j, i, j) for j, i, _ in y.rows()),
        max(h0inv[j] * x[j][j] for j in range(n)),
    )
    left = tuple(v / t for v in l0)
    right = tuple(t / v for v in h0inv)  # H = t * diag(x_sums)
    sc = core.DiagonalScaling(left, right)
    scaled_y = core.BlockMatrix(
        [
            [[left[core.flat_index(M.b, j, i)] * v for v in row] for i, row in enumerate(block)]
            for j, block in enumerate(y.blocks)
        ]
    )
    hinv_x = [[h0inv[j] / t * v for v in x[j]] for j in range(n)]
    extended = core.BlockMatrix(
        [list(block) + [tuple(hinv_x[j])] for j, block in enumerate(scaled_y.blocks)]
    )
    form = core.as_stochastic_k(extended)
    return sc, form
