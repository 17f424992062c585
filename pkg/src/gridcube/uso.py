"""Grids and unique-sink orientations.

Vertices of the grid G(b) are pick tuples (one 0-based row per block);
two vertices are adjacent when they differ in exactly one block. An
orientation stores, per vertex, the set of outgoing moves (j, k): the
edge toward the neighbor obtained by repicking block j at row k.
"""

from dataclasses import dataclass
from itertools import product
from math import prod

from . import glcp as glcp_mod
from . import linalg
from .errors import DegenerateInstanceError, DimensionError, TooLargeError
from .limits import USO_VERTEX_CAP, effective_cap


@dataclass(frozen=True)
class GridUSO:
    b: tuple  # grid type (already extended for GLCP/LP sources)
    out: dict  # vertex -> frozenset of (j, k) moves

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(int(s) for s in self.b))
        out = {}
        for vertex, moves in self.out.items():
            vertex = tuple(vertex)
            if len(vertex) != len(self.b) or any(
                not 0 <= p < s for p, s in zip(vertex, self.b)
            ):
                raise DimensionError(f"invalid vertex {vertex}")
            moves = frozenset((j, k) for j, k in moves)
            for j, k in moves:
                if not 0 <= j < len(self.b) or not 0 <= k < self.b[j] or k == vertex[j]:
                    raise DimensionError(f"invalid move {(j, k)} at vertex {vertex}")
            out[vertex] = moves
        expected = set(grid_vertices(self.b))
        if set(out) != expected:
            raise DimensionError("orientation must cover every grid vertex")
        object.__setattr__(self, "out", out)

    def __eq__(self, other):
        return isinstance(other, GridUSO) and self.b == other.b and self.out == other.out

    def __hash__(self):
        return hash((self.b, tuple(sorted((v, tuple(sorted(m))) for v, m in self.out.items()))))

    def edge_heads_to(self, vertex, j, k):
        return (j, k) in self.out[vertex]


def grid_vertices(b, cap=None):
    limit = effective_cap(USO_VERTEX_CAP) if cap is None else cap
    count = prod(b)
    if count > limit:
        raise TooLargeError(f"grid has {count} vertices, cap is {limit}")
    return [tuple(v) for v in product(*(range(s) for s in b))]


def uso_from_glcp(inst, cap=None):
    """Orient G(b+1) by the sign of the basic values at every vertex."""
    ext = glcp_mod.extended_b(inst.m.b)
    out = {}
    for vertex in grid_vertices(ext, cap):
        values = glcp_mod.basic_values(inst, vertex)
        if values is None:
            raise DegenerateInstanceError(f"singular basis at vertex {vertex}")
        moves = set()
        for (j, i), v in values.items():
            if v == 0:
                raise DegenerateInstanceError(f"zero basic value at vertex {vertex}")
            if v < 0:
                moves.add((j, i))
        out[vertex] = frozenset(moves)
    return GridUSO(ext, out)


def uso_from_grid_lp(lp, cap=None):
    """Orient G(b+1) by reduced-cost signs; equals the dual GLCP's USO."""
    from . import lpgrid

    ext = glcp_mod.extended_b(lp.m.b)
    out = {}
    for vertex in grid_vertices(ext, cap):
        rc = lpgrid.reduced_costs(lp, vertex)
        moves = set()
        for pair, v in rc.items():
            if v == 0:
                raise DegenerateInstanceError(f"zero reduced cost at basis {vertex}")
            if v < 0:
                moves.add(pair)
        out[vertex] = frozenset(moves)
    return GridUSO(ext, out)


def _check_antisymmetry(o):
    for vertex, moves in o.out.items():
        for j, k in moves:
            neighbor = list(vertex)
            neighbor[j] = k
            if (j, vertex[j]) in o.out[tuple(neighbor)]:
                return False
    # every edge oriented at least one way
    for vertex in o.out:
        for j, size in enumerate(o.b):
            for k in range(vertex[j] + 1, size):
                neighbor = list(vertex)
                neighbor[j] = k
                fwd = (j, k) in o.out[vertex]
                back = (j, vertex[j]) in o.out[tuple(neighbor)]
                if fwd == back:
                    return False
    return True


def is_uso(o, cap=None):
    """Check antisymmetry plus a unique sink in every induced subgrid."""
    limit = effective_cap(USO_VERTEX_CAP) if cap is None else cap
    if prod(o.b) > limit:
        raise TooLargeError(f"grid has {prod(o.b)} vertices, cap is {limit}")
    if not _check_antisymmetry(o):
        return False
    subsets_per_block = []
    for size in o.b:
        subsets = []
        for mask in range(1, 1 << size):
            subsets.append(tuple(i for i in range(size) if mask >> i & 1))
        subsets_per_block.append(subsets)
    for rows in product(*subsets_per_block):
        allowed = {(j, k) for j, keep in enumerate(rows) for k in keep}
        sinks = 0
        for vertex in product(*rows):
            if not any(mv in allowed for mv in o.out[vertex]):
                sinks += 1
                if sinks > 1:
                    break
        if sinks != 1:
            return False
    return True


def global_sink(o):
    """The unique vertex with no outgoing edges in the full grid."""
    sinks = [v for v, moves in o.out.items() if not moves]
    if len(sinks) != 1:
        raise DegenerateInstanceError(f"expected one global sink, found {len(sinks)}")
    return sinks[0]


def reorient(o, directions):
    """Flip every edge whose differing block lies in ``directions``."""
    fset = frozenset(directions)
    out = {v: set() for v in o.out}
    for vertex, moves in o.out.items():
        for j, k in moves:
            if j in fset:
                neighbor = list(vertex)
                neighbor[j] = k
                out[tuple(neighbor)].add((j, vertex[j]))
            else:
                out[vertex].add((j, k))
    return GridUSO(o.b, {v: frozenset(m) for v, m in out.items()})


def subuso_matches(big, small):
    """Does restricting ``big`` to the first small-sized rows of every block
    reproduce ``small`` on all shared vertices and edges?"""
    if len(big.b) != len(small.b) or any(bs < ss for bs, ss in zip(big.b, small.b)):
        raise DimensionError("small grid does not embed into big grid")
    for vertex in small.out:
        shared = {
            (j, k) for j, k in big.out[vertex] if k < small.b[j]
        }
        if shared != set(small.out[vertex]):
            return False
    return True


def to_dot(o):
    """GraphViz digraph with vertices keyed by their 1-based picks."""
    def key(v):
        return "|".join(f"{j + 1},{i + 1}" for j, i in enumerate(v))

    lines = ["digraph uso {"]
    for vertex in sorted(o.out):
        lines.append(f'  "{key(vertex)}";')
    for vertex in sorted(o.out):
        for j, k in sorted(o.out[vertex]):
            neighbor = list(vertex)
            neighbor[j] = k
            lines.append(f'  "{key(vertex)}" -> "{key(tuple(neighbor))}";')
    lines.append("}")
    return "\n".join(lines)
