"""Vertical block matrices with exact rational entries.

A block matrix of type ``b = (b_1, ..., b_n)`` stacks ``n`` blocks, block
``j`` holding ``b_j`` rows of width ``n``. Row indices are pairs ``(j, i)``
with ``0 <= i < b_j`` (0-based throughout the code; serialization is
1-based). Picking one row per block yields a representative submatrix, and
the matrix classes below (P, Z, K, stochastic K) quantify over all such
picks.

All sign decisions are exact, so the predicates are decidable; nothing in
this module touches floating point.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import prod

from . import linalg
from .errors import (
    DimensionError,
    InvalidSelectorError,
    NotStochasticKError,
    PreconditionError,
    TooLargeError,
)
from .limits import REPRESENTATIVE_CAP, effective_cap


class BlockMatrix:
    """Immutable vertical block matrix; ``blocks[j][i][k]`` is m^j_{ik}."""

    __slots__ = ("b", "blocks")

    def __init__(self, blocks):
        blocks = tuple(
            tuple(tuple(linalg.to_fraction(x) for x in row) for row in block)
            for block in blocks
        )
        n = len(blocks)
        if n == 0:
            raise DimensionError("block matrix needs at least one block")
        for block in blocks:
            if len(block) < 1:
                raise DimensionError("every block needs at least one row")
            for row in block:
                if len(row) != n:
                    raise DimensionError("row width must equal the number of blocks")
        object.__setattr__(self, "b", tuple(len(block) for block in blocks))
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, *a):
        raise AttributeError("BlockMatrix is immutable")

    @property
    def n(self):
        return len(self.b)

    @property
    def m(self):
        return sum(self.b)

    def row(self, j, i):
        return self.blocks[j][i]

    def entry(self, j, i, k):
        return self.blocks[j][i][k]

    def rows(self):
        """Yield (j, i, row) over all rows in block order."""
        for j, block in enumerate(self.blocks):
            for i, row in enumerate(block):
                yield j, i, row

    def flat_rows(self):
        return [list(row) for _, _, row in self.rows()]

    def column(self, k):
        return [row[k] for _, _, row in self.rows()]

    def to_square(self):
        """Plain n x n matrix when every block has a single row."""
        if any(s != 1 for s in self.b):
            raise DimensionError("matrix has a block of size > 1")
        return [list(block[0]) for block in self.blocks]

    def __eq__(self, other):
        return isinstance(other, BlockMatrix) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        return f"BlockMatrix({[[list(map(str, r)) for r in blk] for blk in self.blocks]})"


def from_square(rows):
    """Wrap an n x n matrix as a block matrix of type (1, ..., 1)."""
    return BlockMatrix([[row] for row in rows])


def eb(b):
    """E(b): the block matrix whose every representative submatrix is I."""
    n = len(b)
    return BlockMatrix(
        [[[Fraction(int(k == j)) for k in range(n)] for _ in range(bj)] for j, bj in enumerate(b)]
    )


def index_pairs(b):
    return [(j, i) for j, bj in enumerate(b) for i in range(bj)]


def flat_index(b, j, i):
    return sum(b[:j]) + i


def representative_count(b):
    return prod(b)


def check_representative_cap(b, cap=None):
    limit = effective_cap(REPRESENTATIVE_CAP) if cap is None else cap
    count = representative_count(b)
    if count > limit:
        raise TooLargeError(f"{count} representatives exceeds cap {limit}")
    return count


def selectors(b):
    """All representative selectors (one 0-based row pick per block)."""
    return product(*(range(bj) for bj in b))


def check_selector(M, sel):
    if len(sel) != M.n:
        raise InvalidSelectorError("selector length must equal the number of blocks")
    for j, i in enumerate(sel):
        if not 0 <= i < M.b[j]:
            raise InvalidSelectorError(f"selector row {i + 1} out of range for block {j + 1}")


def representative_submatrix(M, sel):
    """The n x n matrix whose row j is the selected row of block j."""
    check_selector(M, sel)
    return [list(M.blocks[j][i]) for j, i in enumerate(sel)]


def is_z_matrix(M):
    return z_violation(M) is None


def z_violation(M):
    """First (j, i, k) with a positive off-diagonal-column entry, else None."""
    for j, i, row in M.rows():
        for k, x in enumerate(row):
            if k != j and x > 0:
                return (j, i, k)
    return None


def _square_is_p(a):
    """All principal minors positive, by subset enumeration."""
    n = len(a)
    for mask in range(1, 1 << n):
        idx = [i for i in range(n) if mask >> i & 1]
        sub = [[a[r][c] for c in idx] for r in idx]
        if linalg.det(sub) <= 0:
            return False
    return True


def p_violation(M, cap=None):
    """First nonpositive principal minor, as (rows, minor value), or None.

    Enumerates minors grouped by index subset so each determinant is
    computed once; exponential and guarded by the representative cap.
    ``rows`` lists the (j, i) pairs whose rows and columns j form the
    violating principal submatrix.
    """
    check_representative_cap(M.b, cap)
    n = M.n
    for mask in range(1, 1 << n):
        idx = [j for j in range(n) if mask >> j & 1]
        for picks in product(*(range(M.b[j]) for j in idx)):
            sub = [[M.blocks[j][i][k] for k in idx] for j, i in zip(idx, picks)]
            d = linalg.det(sub)
            if d <= 0:
                return list(zip(idx, picks)), d
    return None


def is_p_matrix(M, cap=None):
    """Every principal minor of every representative submatrix is positive."""
    return p_violation(M, cap) is None


def k_certificate(M):
    """A vector x > 0 with Mx > 0, or None if no such vector exists."""
    from . import exactlp

    return exactlp.strict_feasibility(M.flat_rows())


def is_k_matrix(M):
    """Z-property plus a strict certificate x > 0, Mx > 0."""
    if not is_z_matrix(M):
        return False
    return k_certificate(M) is not None


@dataclass(frozen=True)
class StochasticKForm:
    """Decomposition M = E(b) - gamma * P with P rowstochastic."""

    gamma: Fraction
    p: BlockMatrix

    def matrix(self):
        e = eb(self.p.b)
        return BlockMatrix(
            [
                [
                    [e.entry(j, i, k) - self.gamma * self.p.entry(j, i, k) for k in range(self.p.n)]
                    for i in range(self.p.b[j])
                ]
                for j in range(self.p.n)
            ]
        )


def uniform_rowstochastic(b):
    n = len(b)
    u = Fraction(1, n)
    return BlockMatrix([[[u] * n for _ in range(bj)] for bj in b])


def as_stochastic_k(M):
    """Decompose M as E(b) - gamma * P or raise NotStochasticKError.

    Decision rule: G := E(b) - M must be entrywise nonnegative with a
    common row sum gamma in [0, 1); then P := G / gamma (uniform when
    gamma is zero, which leaves P unconstrained).
    """
    e = eb(M.b)
    g_blocks = []
    gamma = None
    for j, i, row in M.rows():
        g_row = [e.entry(j, i, k) - x for k, x in enumerate(row)]
        for k, x in enumerate(g_row):
            if x < 0:
                raise NotStochasticKError(
                    f"entry ({j + 1},{i + 1},{k + 1}) exceeds the E(b) pattern", row=(j, i)
                )
        s = sum(g_row)
        if gamma is None:
            gamma = s
        elif s != gamma:
            raise NotStochasticKError(
                f"row ({j + 1},{i + 1}) sum {s} differs from {gamma}", row=(j, i)
            )
        g_blocks.append(g_row)
    if gamma >= 1:
        raise NotStochasticKError(f"common factor {gamma} is not below 1", row=None)
    if gamma == 0:
        return StochasticKForm(Fraction(0), uniform_rowstochastic(M.b))
    it = iter(g_blocks)
    p = BlockMatrix([[[x / gamma for x in next(it)] for _ in range(bj)] for bj in M.b])
    return StochasticKForm(gamma, p)


def is_stochastic_k(M):
    try:
        as_stochastic_k(M)
        return True
    except NotStochasticKError:
        return False


@dataclass(frozen=True)
class DiagonalScaling:
    """Positive row factors (length m) and column factors (length n)."""

    left: tuple
    right: tuple

    def __post_init__(self):
        left = tuple(linalg.to_fraction(x) for x in self.left)
        right = tuple(linalg.to_fraction(x) for x in self.right)
        if any(x <= 0 for x in left) or any(x <= 0 for x in right):
            raise PreconditionError("scaling factors must be strictly positive")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)


def scale(M, sc):
    """LMH for positive diagonal L (rows) and H (columns)."""
    if len(sc.left) != M.m or len(sc.right) != M.n:
        raise DimensionError("scaling dimensions do not match the matrix")
    out = []
    pos = 0
    for block in M.blocks:
        rows = []
        for row in block:
            l = sc.left[pos]
            rows.append([l * x * h for x, h in zip(row, sc.right)])
            pos += 1
        out.append(rows)
    return BlockMatrix(out)


def signed_conjugate(M, signs):
    """SMS: block-j rows multiplied by s_j, column k multiplied by s_k."""
    if len(signs) != M.n:
        raise DimensionError("signature length must equal the number of blocks")
    if any(s not in (1, -1) for s in signs):
        raise PreconditionError("signature entries must be +1 or -1")
    return BlockMatrix(
        [
            [[signs[j] * x * signs[k] for k, x in enumerate(row)] for row in block]
            for j, block in enumerate(M.blocks)
        ]
    )


def stochastic_form(M, x):
    """Scale a K-matrix into stochastic K form using a certificate x.

    With H = diag(x) the rows of MH sum to Mx > 0; normalizing every row
    sum to 1/t, where t is the largest diagonal-column entry after the
    first normalization, lands every representative submatrix at
    I - gamma * S with gamma = (t - 1)/t.
    """
    x = linalg.vec(x)
    if len(x) != M.n or any(v <= 0 for v in x):
        raise PreconditionError("certificate must be a positive n-vector")
    y = []
    for j, i, row in M.rows():
        s = sum(a * b for a, b in zip(row, x))
        if s <= 0:
            raise PreconditionError(f"certificate fails: (Mx) at row ({j + 1},{i + 1}) is {s}")
        y.append(s)
    t = max(
        M.entry(j, i, j) * x[j] / y[flat_index(M.b, j, i)] for j, i, _ in M.rows()
    )
    left = tuple(Fraction(1) / (t * yi) for yi in y)
    sc = DiagonalScaling(left, tuple(x))
    form = as_stochastic_k(scale(M, sc))
    return sc, form
