"""Grid linear programs and their duality with hidden K-GLCPs.

A Grid-LP minimizes q^T u subject to M^T u <= p, u >= 0, where every
maximal complementary basis of A = [M^T | I] is feasible and
nondegenerate, so the feasible region is combinatorially equivalent to
the grid G(b+1). Bases share the vertex encoding of the glcp module: a
pick tuple, entry j naming the basic column of block j (index b_j is the
slack of constraint j).
"""

from dataclasses import dataclass
from fractions import Fraction
from math import prod

from . import core, glcp as glcp_mod, linalg
from .errors import (
    DegenerateInstanceError,
    DimensionError,
    PreconditionError,
    TooLargeError,
)
from .limits import USO_VERTEX_CAP, effective_cap


@dataclass(frozen=True)
class GridLP:
    m: core.BlockMatrix
    p: tuple  # length n
    q: tuple  # length m, objective on u

    def __post_init__(self):
        p = tuple(linalg.to_fraction(v) for v in self.p)
        q = tuple(linalg.to_fraction(v) for v in self.q)
        if len(p) != self.m.n or len(q) != self.m.m:
            raise DimensionError("LP data does not match the matrix type")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)


def _basis_columns(lp, vertex):
    """Columns of [M^T | I] selected by the vertex, as an n x n matrix."""
    n = lp.m.n
    cols = []
    for j, pick in enumerate(vertex):
        if pick < lp.m.b[j]:
            cols.append(list(lp.m.row(j, pick)))  # column of M^T = row of M
        else:
            cols.append([Fraction(int(r == j)) for r in range(n)])
    return linalg.transpose(cols)


def basis_point(lp, vertex):
    """Basic values A_B^{-1} p for the basis, or None when singular."""
    a_b = _basis_columns(lp, vertex)
    return linalg.solve(a_b, list(lp.p))


def is_grid_lp(m, p, cap=None):
    """Exhaustively check that every basis is feasible and nondegenerate."""
    lp = GridLP(m, tuple(p), tuple([Fraction(0)] * m.m))
    for vertex in _vertices(m.b, cap):
        x = basis_point(lp, vertex)
        if x is None or any(v <= 0 for v in x):
            return False
    return True


def _vertices(b, cap=None):
    ext = glcp_mod.extended_b(b)
    limit = effective_cap(USO_VERTEX_CAP) if cap is None else cap
    count = prod(ext)
    if count > limit:
        raise TooLargeError(f"grid has {count} vertices, cap is {limit}")
    from itertools import product as iproduct

    return [tuple(v) for v in iproduct(*(range(s) for s in ext))]


def dual_lp_from_glcp(inst, x, v=None):
    """The dual Grid-LP of a hidden K-GLCP: p = X^{-T} v for v > 0."""
    from . import witness

    if not witness.verify_proper(inst.m, x):
        raise PreconditionError("X is not a proper hidden K witness of M")
    n = inst.m.n
    v = [Fraction(1)] * n if v is None else linalg.vec(v)
    if len(v) != n or any(t <= 0 for t in v):
        raise PreconditionError("v must be a positive n-vector")
    xt = linalg.transpose(linalg.mat(x))
    p = linalg.solve(xt, v)
    if p is None:
        raise PreconditionError("witness matrix is singular")
    return GridLP(inst.m, tuple(p), inst.q)


def glcp_from_grid_lp(lp):
    return glcp_mod.GLCPInstance(lp.m, lp.q)


def reduced_costs(lp, vertex):
    """c_N - c_B A_B^{-1} A_N for basis B, indexed by the nonbasic pairs."""
    a_b = _basis_columns(lp, vertex)
    c_b = [
        lp.q[core.flat_index(lp.m.b, j, pick)] if pick < lp.m.b[j] else Fraction(0)
        for j, pick in enumerate(vertex)
    ]
    at_b = linalg.transpose(a_b)
    y = linalg.solve(at_b, c_b)
    if y is None:
        raise DegenerateInstanceError(f"singular basis at vertex {vertex}")
    rc = {}
    for j, bj in enumerate(lp.m.b):
        for i in range(bj + 1):
            if i == vertex[j]:
                continue
            if i < bj:
                col = list(lp.m.row(j, i))
                c = lp.q[core.flat_index(lp.m.b, j, i)]
            else:
                col = [Fraction(int(r == j)) for r in range(lp.m.n)]
                c = Fraction(0)
            rc[(j, i)] = c - linalg.dot(y, col)
    return rc


def reduced_cost_identity_check(lp, vertex):
    """Reduced costs must equal the dual GLCP's basic values at the vertex."""
    rc = reduced_costs(lp, vertex)
    values = glcp_mod.basic_values(glcp_from_grid_lp(lp), vertex)
    if values is None:
        return False
    return rc == values


@dataclass(frozen=True)
class SimplexResult:
    basis: tuple  # optimal vertex
    u: tuple  # optimal u (length m, block order)
    value: Fraction
    pivots: int


def grid_simplex(lp, rule="least-index"):
    """Walk reduced-cost-negative edges to the USO sink.

    Grid-LPs are primal nondegenerate, so every pivot strictly improves
    and any entering rule terminates. The leaving variable is always the
    basic element of the entering block, which keeps all bases maximal
    complementary; this is asserted via feasibility of every new basis.
    """
    if rule not in ("least-index", "most-negative"):
        raise PreconditionError(f"unknown pivot rule {rule!r}")
    vertex = tuple(lp.m.b)  # all-slack basis; feasible since p > 0 for Grid-LPs
    x = basis_point(lp, vertex)
    if x is None or any(v <= 0 for v in x):
        raise PreconditionError("all-slack basis is not feasible; not a Grid-LP")
    pivots = 0
    limit = prod(glcp_mod.extended_b(lp.m.b)) + 1
    for _ in range(limit):
        rc = reduced_costs(lp, vertex)
        if any(v == 0 for v in rc.values()):
            raise DegenerateInstanceError(f"zero reduced cost at basis {vertex}")
        negatives = [pair for pair in sorted(rc) if rc[pair] < 0]
        if not negatives:
            x = basis_point(lp, vertex)
            u = [Fraction(0)] * lp.m.m
            value = Fraction(0)
            for j, pick in enumerate(vertex):
                if pick < lp.m.b[j]:
                    idx = core.flat_index(lp.m.b, j, pick)
                    u[idx] = x[j]
                    value += lp.q[idx] * x[j]
            return SimplexResult(vertex, tuple(u), value, pivots)
        if rule == "least-index":
            j, i = negatives[0]
        else:
            j, i = min(negatives, key=lambda pair: (rc[pair], pair))
        nxt = list(vertex)
        nxt[j] = i
        vertex = tuple(nxt)
        x = basis_point(lp, vertex)
        if x is None or any(v <= 0 for v in x):
            raise PreconditionError("pivot left the grid; input is not a Grid-LP")
        pivots += 1
    raise DegenerateInstanceError("simplex failed to terminate within the vertex count")
