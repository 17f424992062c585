"""Generalized linear complementarity problems over vertical block matrices.

GLCP(M, q): find w >= 0 (block vector of type b) and z >= 0 with
w - Mz = q and, per block j, z_j * prod_i w^j_i = 0.

Vertices of the grid G(b+1) are encoded as pick tuples: entry j is the
0-based index of the nonbasic element of block j, where index b_j stands
for z_j. The complement of a vertex (everything basic) is a solution
basis when the basic solution is nonnegative.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import prod

from . import core, linalg
from .errors import (
    DegenerateInstanceError,
    DimensionError,
    NotPMatrixError,
    PreconditionError,
    TooLargeError,
)
from .limits import USO_VERTEX_CAP, effective_cap


@dataclass(frozen=True)
class GLCPInstance:
    m: core.BlockMatrix
    q: tuple

    def __post_init__(self):
        q = tuple(linalg.to_fraction(v) for v in self.q)
        if len(q) != self.m.m:
            raise DimensionError("right-hand side length must equal the row count")
        object.__setattr__(self, "q", q)

    @property
    def b(self):
        return self.m.b

    def q_entry(self, j, i):
        return self.q[core.flat_index(self.m.b, j, i)]

    def q_block(self, j):
        base = core.flat_index(self.m.b, j, 0)
        return self.q[base : base + self.m.b[j]]


@dataclass(frozen=True)
class GLCPSolution:
    w: tuple  # tuple of per-block tuples
    z: tuple

    @staticmethod
    def of(w, z):
        return GLCPSolution(
            tuple(tuple(linalg.to_fraction(v) for v in block) for block in w),
            tuple(linalg.to_fraction(v) for v in z),
        )

    def w_flat(self):
        return [v for block in self.w for v in block]


@dataclass(frozen=True)
class SolutionBasis:
    """Stored as the complementary vertex: one nonbasic pick per block."""

    b: tuple  # underlying GLCP type
    nonbasic: tuple  # picks in the extended grid, value b_j means z_j

    def basic_pairs(self):
        return [
            (j, i)
            for j, bj in enumerate(self.b)
            for i in range(bj + 1)
            if i != self.nonbasic[j]
        ]


def extended_b(b):
    return tuple(bj + 1 for bj in b)


def grid_vertices(ext_b, cap=None):
    limit = effective_cap(USO_VERTEX_CAP) if cap is None else cap
    count = prod(ext_b)
    if count > limit:
        raise TooLargeError(f"grid has {count} vertices, cap is {limit}")
    return list(product(*(range(s) for s in ext_b)))


def basic_values(inst, vertex):
    """Solve [I | -M]_N x = q for the complement N of the vertex.

    Returns a dict mapping basic pairs (j, i) to their exact values, or
    None when the basis matrix is singular.
    """
    M, b = inst.m, inst.m.b
    pairs = []
    cols = []
    for j, bj in enumerate(b):
        for i in range(bj + 1):
            if i == vertex[j]:
                continue
            pairs.append((j, i))
            if i < bj:
                col = [Fraction(0)] * M.m
                col[core.flat_index(b, j, i)] = Fraction(1)
            else:
                col = [-v for v in M.column(j)]
            cols.append(col)
    a = linalg.transpose(cols)
    x = linalg.solve(a, list(inst.q))
    if x is None:
        return None
    return dict(zip(pairs, x))


def solution_from_values(inst, vertex, values):
    b = inst.m.b
    w = []
    z = []
    for j, bj in enumerate(b):
        w.append(tuple(values.get((j, i), Fraction(0)) for i in range(bj)))
        z.append(values.get((j, bj), Fraction(0)))
    return GLCPSolution(tuple(w), tuple(z))


def verify_solution(inst, sol):
    """Exact check of the linear system, nonnegativity and complementarity."""
    b = inst.m.b
    if len(sol.z) != inst.m.n or tuple(len(blk) for blk in sol.w) != b:
        return False
    if any(v < 0 for v in sol.z) or any(v < 0 for blk in sol.w for v in blk):
        return False
    z = list(sol.z)
    for j, i, row in inst.m.rows():
        if sol.w[j][i] - linalg.dot(row, z) != inst.q_entry(j, i):
            return False
    for j, bj in enumerate(b):
        p = sol.z[j]
        for i in range(bj):
            p *= sol.w[j][i]
        if p != 0:
            return False
    return True


def brute_force_solve(inst, cap=None):
    """All solution bases by exhaustive enumeration of grid vertices.

    The oracle path: exponential in the instance size, exact, and
    independent of any pivoting machinery.
    """
    results = []
    for vertex in grid_vertices(extended_b(inst.m.b), cap):
        values = basic_values(inst, vertex)
        if values is None:
            continue
        if all(v >= 0 for v in values.values()):
            sol = solution_from_values(inst, vertex, values)
            results.append((SolutionBasis(inst.m.b, vertex), sol))
    return results


def _start_vertex(b):
    return tuple(b)  # all z nonbasic: w = q, z = 0


def _negative_pairs(values, b, vertex):
    out = []
    for j, bj in enumerate(b):
        for i in range(bj + 1):
            if i != vertex[j] and values[(j, i)] < 0:
                out.append((j, i))
    return out


@dataclass(frozen=True)
class PivotResult:
    basis: SolutionBasis
    solution: GLCPSolution
    pivots: int
    trace: tuple  # ((vertex, entering pair), ...)


def principal_pivot_solve(inst, rule="least-index", start=None, perturb=False):
    """Simple principal pivoting from the all-w vertex (z = 0).

    At each vertex the basic values [I|-M]_N^{-1} q are inspected; a block
    holding a negative entry is chosen by the rule (least block index, or
    most negative value) with least-row tie-breaking, and the nonbasic
    element of that block is swapped against the negative entry. Exact
    zeros abort with a degeneracy error unless the symbolic lexicographic
    perturbation is enabled.
    """
    if rule not in ("least-index", "most-negative"):
        raise PreconditionError(f"unknown pivot rule {rule!r}")
    if perturb:
        return _pivot_solve_perturbed(inst, rule, start)
    b = inst.m.b
    vertex = tuple(start) if start is not None else _start_vertex(b)
    seen_limit = prod(extended_b(b)) + 1
    trace = []
    for _ in range(seen_limit):
        values = basic_values(inst, vertex)
        if values is None:
            raise NotPMatrixError(f"singular basis matrix at vertex {vertex}")
        if any(v == 0 for v in values.values()):
            raise DegenerateInstanceError(f"zero basic value at vertex {vertex}")
        negatives = _negative_pairs(values, b, vertex)
        if not negatives:
            sol = solution_from_values(inst, vertex, values)
            return PivotResult(SolutionBasis(b, vertex), sol, len(trace), tuple(trace))
        if rule == "least-index":
            j, i = negatives[0]
        else:
            j, i = min(negatives, key=lambda p: (values[p], p))
        trace.append((vertex, (j, i)))
        nxt = list(vertex)
        nxt[j] = i
        vertex = tuple(nxt)
    raise NotPMatrixError("pivoting revisited a vertex; matrix is not P")


def _lex_cmp_zero(vec):
    """Sign of a lexicographic value (coefficients of eps^0, eps^1, ...)."""
    for v in vec:
        if v != 0:
            return 1 if v > 0 else -1
    return 0


def _pivot_solve_perturbed(inst, rule, start):
    """Pivoting on q(eps) = q + (eps, eps^2, ...), handled symbolically."""
    M, b = inst.m, inst.m.b
    vertex = tuple(start) if start is not None else _start_vertex(b)
    rhs = [[qi] + [Fraction(int(r == k)) for k in range(M.m)] for r, qi in enumerate(inst.q)]
    seen_limit = prod(extended_b(b)) + 1
    trace = []
    for _ in range(seen_limit):
        pairs = []
        cols = []
        for j, bj in enumerate(b):
            for i in range(bj + 1):
                if i == vertex[j]:
                    continue
                pairs.append((j, i))
                if i < bj:
                    col = [Fraction(0)] * M.m
                    col[core.flat_index(b, j, i)] = Fraction(1)
                else:
                    col = [-v for v in M.column(j)]
                cols.append(col)
        x = linalg.solve(linalg.transpose(cols), rhs)
        if x is None:
            raise NotPMatrixError(f"singular basis matrix at vertex {vertex}")
        values = dict(zip(pairs, x))
        signs = {p: _lex_cmp_zero(v) for p, v in values.items()}
        if any(s == 0 for s in signs.values()):
            raise DegenerateInstanceError("lexicographic tie; perturbation insufficient")
        negatives = [p for p in pairs if signs[p] < 0]
        if not negatives:
            plain = {p: v[0] for p, v in values.items()}
            sol = solution_from_values(inst, vertex, plain)
            return PivotResult(SolutionBasis(b, vertex), sol, len(trace), tuple(trace))
        if rule == "least-index":
            j, i = negatives[0]
        else:
            j, i = min(negatives, key=lambda p: (values[p], p))
        trace.append((vertex, (j, i)))
        nxt = list(vertex)
        nxt[j] = i
        vertex = tuple(nxt)
    raise NotPMatrixError("pivoting revisited a vertex; matrix is not P")


def z_at_vertex(inst, vertex):
    """The z-part of the basic solution at a vertex (None when singular)."""
    values = basic_values(inst, vertex)
    if values is None:
        return None
    b = inst.m.b
    return tuple(values.get((j, b[j]), Fraction(0)) for j in range(inst.m.n))


def check_k_monotonicity(inst, trace):
    """Replay a pivot trace: along every pivot chosen on a negative entry,
    z must grow componentwise and change somewhere."""
    for vertex, (j, i) in trace:
        z_before = z_at_vertex(inst, vertex)
        nxt = list(vertex)
        nxt[j] = i
        z_after = z_at_vertex(inst, tuple(nxt))
        if z_before is None or z_after is None:
            return False
        if any(a < b for a, b in zip(z_after, z_before)):
            return False
        if z_after == z_before:
            return False
    return True
