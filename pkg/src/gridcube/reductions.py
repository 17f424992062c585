"""Structural reductions between GLCP/LP/MDP/game formulations.

Every reduction is decomposed into replayable steps. A step knows how to
transform an instance forward and how to pull a solution of the
transformed instance back; a ReductionTrace bundles the original problem
with the step list, so recovery can replay the forward chain to rebuild
every intermediate instance and then walk the solutions backward.

Step kinds:
  glcp_scale      (M, q) -> (LMH, Lq);   (w, z) <- (L^-1 w', H z')
  permute_rows    reorder rows inside one block
  p_split         one P-GLCP block split into a reduced block plus two
                  singleton blocks (rows must be diagonal-normalized)
  k_split         one stochastic K-GLCP block split into a reduced block
                  plus a binary block (unscaled; pair with glcp_scale)
  hiddenk_to_k    GLCP(M, q) -> GLCP([MX|X], [q - Mf | -f])
  k_to_hiddenk    eliminate one row per block with nonpositive rhs
  mdp_to_kglcp / kglcp_to_mdp     value vector <-> (w, z) bridges
  grid_lp_to_glcp / glcp_to_grid_lp   optimal basis <-> (w, z) bridges
"""

from dataclasses import dataclass
from fractions import Fraction

from . import core, glcp as glcp_mod, linalg, lpgrid, mdp as mdp_mod, witness
from .errors import DimensionError, PreconditionError


# ---------------------------------------------------------------------------
# solution values passed between steps


@dataclass(frozen=True)
class GlcpSol:
    w: tuple  # per-block tuples
    z: tuple


@dataclass(frozen=True)
class ValueSol:
    v: tuple


@dataclass(frozen=True)
class BasisSol:
    """An optimal Grid-LP basis (vertex picks) with its point."""

    vertex: tuple
    u: tuple
    value: Fraction


def glcp_sol(sol):
    return GlcpSol(tuple(tuple(b) for b in sol.w), tuple(sol.z))


def as_glcp_solution(s):
    return glcp_mod.GLCPSolution.of(s.w, s.z)


# ---------------------------------------------------------------------------
# steps


@dataclass(frozen=True)
class GlcpScale:
    kind = "glcp_scale"
    left: tuple
    right: tuple

    def apply(self, inst):
        sc = core.DiagonalScaling(self.left, self.right)
        m = core.scale(inst.m, sc)
        q = tuple(l * v for l, v in zip(self.left, inst.q))
        return glcp_mod.GLCPInstance(m, q)

    def recover(self, before, s):
        w = []
        pos = 0
        for block in s.w:
            w.append(tuple(v / self.left[pos + i] for i, v in enumerate(block)))
            pos += len(block)
        z = tuple(v * h for v, h in zip(s.z, self.right))
        return GlcpSol(tuple(w), z)


@dataclass(frozen=True)
class PermuteRows:
    kind = "permute_rows"
    block: int
    perm: tuple  # new row t is old row perm[t]

    def apply(self, inst):
        j = self.block
        blocks = [list(map(list, blk)) for blk in inst.m.blocks]
        qb = list(inst.q_block(j))
        blocks[j] = [blocks[j][t] for t in self.perm]
        q = list(inst.q)
        base = core.flat_index(inst.m.b, j, 0)
        for i, t in enumerate(self.perm):
            q[base + i] = qb[t]
        return glcp_mod.GLCPInstance(core.BlockMatrix(blocks), tuple(q))

    def recover(self, before, s):
        j = self.block
        w = list(s.w)
        old = [None] * len(self.perm)
        for i, t in enumerate(self.perm):
            old[t] = s.w[j][i]
        w[j] = tuple(old)
        return GlcpSol(tuple(w), s.z)


@dataclass(frozen=True)
class PSplit:
    kind = "p_split"
    block: int

    def apply(self, inst):
        j = self.block
        b = inst.m.b
        n = inst.m.n
        if b[j] < 2:
            raise PreconditionError("block has a single row; nothing to split")
        for i in range(b[j]):
            if inst.m.entry(j, i, j) != 1:
                raise PreconditionError("split block must be diagonal-normalized first")
        blocks = []
        q = []
        for k in range(n):
            rows = []
            if k == j:
                for i in range(b[j] - 1):
                    row = list(inst.m.row(j, i)) + [Fraction(0), Fraction(0)]
                    rows.append(row)
                    q.append(inst.q_entry(j, i))
            else:
                for i in range(b[k]):
                    row = list(inst.m.row(k, i)) + [Fraction(0), inst.m.entry(k, i, j)]
                    rows.append(row)
                    q.append(inst.q_entry(k, i))
            blocks.append(rows)
        last = list(inst.m.row(j, b[j] - 1)) + [Fraction(1), Fraction(0)]
        last[j] = Fraction(0)
        blocks.append([last])
        q.append(inst.q_entry(j, b[j] - 1))
        closing = [Fraction(0)] * (n + 2)
        closing[j] = Fraction(1)
        closing[n] = Fraction(-1)
        closing[n + 1] = Fraction(1)
        blocks.append([closing])
        q.append(Fraction(0))
        return glcp_mod.GLCPInstance(core.BlockMatrix(blocks), tuple(q))

    def recover(self, before, s):
        j = self.block
        n = before.m.n
        v_j, v_new, v_clo = s.z[j], s.z[n], s.z[n + 1]
        u_new, u_clo = s.w[n][0], s.w[n + 1][0]
        z = list(s.z[:n])
        w = list(s.w[:n])
        if v_j > v_new:
            z[j] = v_j
            wj = tuple(s.w[j]) + (u_new + u_clo,)
        else:
            z[j] = v_new
            wj = tuple(v + v_clo for v in s.w[j]) + (u_new,)
        w[j] = wj
        return GlcpSol(tuple(w), tuple(z))


@dataclass(frozen=True)
class KSplit:
    kind = "k_split"
    block: int

    def apply(self, inst):
        j = self.block
        form = core.as_stochastic_k(inst.m)
        gamma, p = form.gamma, form.p
        b = inst.m.b
        n = inst.m.n
        if b[j] < 2:
            raise PreconditionError("block has a single row; nothing to split")
        blocks = []
        q = []
        for k in range(n):
            rows = []
            if k == j:
                for i in range(b[j] - 1):
                    row = list(inst.m.row(j, i)) + [-gamma * p.entry(j, i, j)]
                    row[j] = Fraction(1)
                    rows.append(row)
                    q.append(inst.q_entry(j, i))
            else:
                for i in range(b[k]):
                    row = list(inst.m.row(k, i)) + [inst.m.entry(k, i, j)]
                    row[j] = Fraction(0)
                    rows.append(row)
                    q.append(inst.q_entry(k, i))
            blocks.append(rows)
        last = list(inst.m.row(j, b[j] - 1)) + [inst.m.entry(j, b[j] - 1, j)]
        last[j] = Fraction(0)
        closing = [Fraction(0)] * (n + 1)
        closing[j] = Fraction(-1)
        closing[n] = Fraction(1)
        blocks.append([last, closing])
        q.append(inst.q_entry(j, b[j] - 1))
        q.append(Fraction(0))
        return glcp_mod.GLCPInstance(core.BlockMatrix(blocks), tuple(q))

    def recover(self, before, s):
        j = self.block
        n = before.m.n
        u1, u2 = s.w[n]
        z = list(s.z[:n])
        z[j] = s.z[n]
        w = list(s.w[:n])
        w[j] = tuple(v + u2 for v in s.w[j]) + (u1,)
        return GlcpSol(tuple(w), tuple(z))

    def scaling(self, inst):
        """Row/column rescaling restoring stochastic K form after the split.

        Rows of untouched blocks and the split-off row are halved, the
        reduced block's own column shrinks to (1 + gamma)/2; the result
        is stochastic K with exactly that factor. ``inst`` is the
        instance before the split.
        """
        form = core.as_stochastic_k(inst.m)
        gamma = form.gamma
        b = inst.m.b
        left = []
        for k in range(inst.m.n):
            size = b[k] - 1 if k == self.block else b[k]
            left.extend([Fraction(1) if k == self.block else Fraction(1, 2)] * size)
        left.extend([Fraction(1, 2), Fraction(1)])
        right = [Fraction(1)] * (inst.m.n + 1)
        right[self.block] = (1 + gamma) / 2
        return GlcpScale(tuple(left), tuple(right))


@dataclass(frozen=True)
class HiddenkToK:
    kind = "hiddenk_to_k"
    x: tuple  # proper witness, n x n
    f: tuple  # positive n-vector

    def apply(self, inst):
        x = linalg.mat(self.x)
        f = linalg.vec(self.f)
        if any(v <= 0 for v in f):
            raise PreconditionError("f must be strictly positive")
        if not witness.verify_proper(inst.m, x):
            raise PreconditionError("X is not a proper hidden K witness of M")
        ext = witness.extend_with_witness(inst.m, x)
        mf = [linalg.dot(list(row), f) for _, _, row in inst.m.rows()]
        q = []
        pos = 0
        for j, bj in enumerate(inst.m.b):
            for i in range(bj):
                q.append(inst.q[pos] - mf[pos])
                pos += 1
            q.append(-f[j])
        return glcp_mod.GLCPInstance(ext, tuple(q))

    def recover(self, before, s):
        w = tuple(tuple(block[:-1]) for block in s.w)
        z = tuple(block[-1] for block in s.w)
        return GlcpSol(w, z)


@dataclass(frozen=True)
class KToHiddenk:
    kind = "k_to_hiddenk"
    picks: tuple  # selected row per block (the eliminated representative C)

    def apply(self, inst):
        b = inst.m.b
        if any(bj < 2 for bj in b):
            raise PreconditionError("every block needs at least two rows")
        core.check_selector(inst.m, self.picks)
        q_c = [inst.q_entry(j, i) for j, i in enumerate(self.picks)]
        if any(v > 0 for v in q_c):
            raise PreconditionError("selected rows must have nonpositive right-hand side")
        m_c = core.representative_submatrix(inst.m, self.picks)
        inv = linalg.inverse(m_c)
        if inv is None:
            raise PreconditionError("selected representative submatrix is singular")
        blocks = []
        q = []
        for j, bj in enumerate(b):
            rows = []
            for i in range(bj):
                if i == self.picks[j]:
                    continue
                row = linalg.mat_vec(linalg.transpose(inv), list(inst.m.row(j, i)))
                rows.append(row)
                q.append(inst.q_entry(j, i) - linalg.dot(row, q_c))
            blocks.append(rows)
        return glcp_mod.GLCPInstance(core.BlockMatrix(blocks), tuple(q))

    def recover(self, before, s):
        m_c = core.representative_submatrix(before.m, self.picks)
        q_c = [before.q_entry(j, i) for j, i in enumerate(self.picks)]
        rhs = [linalg.to_fraction(v) - c for v, c in zip(s.z, q_c)]
        z = linalg.solve(m_c, rhs)
        w = []
        for j, bj in enumerate(before.m.b):
            block = []
            it = iter(s.w[j])
            for i in range(bj):
                block.append(s.z[j] if i == self.picks[j] else next(it))
            w.append(tuple(block))
        return GlcpSol(tuple(w), tuple(z))


@dataclass(frozen=True)
class MdpToKglcp:
    kind = "mdp_to_kglcp"
    d: Fraction

    def apply(self, inst):
        out, _ = mdp_mod.mdp_to_kglcp(inst, self.d)
        return out

    def recover(self, before, s):
        v = mdp_mod.values_from_glcp_solution(s.z, self.d, before.gamma)
        return ValueSol(v)


@dataclass(frozen=True)
class KglcpToMdp:
    kind = "kglcp_to_mdp"

    def apply(self, inst):
        out, _ = mdp_mod.kglcp_to_mdp(inst)
        return out

    def recover(self, before, s):
        z = list(linalg.vec(s.v))  # offset 0: z equals the values
        w = []
        pos = 0
        for j, bj in enumerate(before.m.b):
            block = []
            for i in range(bj):
                row = list(before.m.row(j, i))
                block.append(linalg.dot(row, z) + before.q[pos])
                pos += 1
            w.append(tuple(block))
        return GlcpSol(tuple(w), tuple(z))


@dataclass(frozen=True)
class GridLpToGlcp:
    kind = "grid_lp_to_glcp"

    def apply(self, lp):
        return lpgrid.glcp_from_grid_lp(lp)

    def recover(self, before, s):
        vertex = _vertex_of_glcp_solution(before.m.b, s)
        x = lpgrid.basis_point(before, vertex)
        u = [Fraction(0)] * before.m.m
        value = Fraction(0)
        for j, pick in enumerate(vertex):
            if pick < before.m.b[j]:
                idx = core.flat_index(before.m.b, j, pick)
                u[idx] = x[j]
                value += before.q[idx] * x[j]
        return BasisSol(vertex, tuple(u), value)


@dataclass(frozen=True)
class GlcpToGridLp:
    kind = "glcp_to_grid_lp"
    p: tuple

    def apply(self, inst):
        return lpgrid.GridLP(inst.m, self.p, inst.q)

    def recover(self, before, s):
        values = glcp_mod.basic_values(before, s.vertex)
        if values is None or any(v < 0 for v in values.values()):
            raise PreconditionError("basis does not complement a solution basis")
        sol = glcp_mod.solution_from_values(before, s.vertex, values)
        return glcp_sol(sol)


def _vertex_of_glcp_solution(b, s):
    """The complementary vertex picked by the zero pattern of (w, z)."""
    vertex = []
    for j, bj in enumerate(b):
        zeros = [i for i in range(bj) if s.w[j][i] == 0]
        if s.z[j] == 0:
            zeros.append(bj)
        if not zeros:
            raise PreconditionError(f"block {j + 1} has no zero entry")
        vertex.append(zeros[0])
    return tuple(vertex)


# ---------------------------------------------------------------------------
# trace


@dataclass(frozen=True)
class ReductionTrace:
    original: object  # GLCPInstance | GridLP | DiscountedMDP | StochasticGame
    steps: tuple

    def replay(self):
        """Forward replay; returns the list of instances, original first."""
        chain = [self.original]
        for step in self.steps:
            chain.append(step.apply(chain[-1]))
        return chain

    def final(self):
        return self.replay()[-1]

    def recover(self, reduced_solution):
        chain = self.replay()
        s = reduced_solution
        for step, before in zip(reversed(self.steps), reversed(chain[:-1])):
            s = step.recover(before, s)
        return s


def extend_trace(trace, more_steps):
    return ReductionTrace(trace.original, trace.steps + tuple(more_steps))


# ---------------------------------------------------------------------------
# reduction operations


def hiddenk_to_k(inst, x, f=None):
    """Hidden K-GLCP of type b as a K-GLCP of type b + 1."""
    f = tuple(Fraction(1) for _ in range(inst.m.n)) if f is None else tuple(linalg.vec(f))
    step = HiddenkToK(tuple(tuple(linalg.to_fraction(v) for v in row) for row in x), f)
    out = step.apply(inst)
    return out, ReductionTrace(inst, (step,))


def k_to_hiddenk(inst, picks):
    """K-GLCP as a hidden K-GLCP of type b - 1, eliminating rows C."""
    step = KToHiddenk(tuple(picks))
    out = step.apply(inst)
    return out, ReductionTrace(inst, (step,))


def normalize_diagonals(inst):
    """Row-scale so every diagonal-column entry equals one."""
    left = []
    for j, i, row in inst.m.rows():
        d = row[j]
        if d <= 0:
            raise PreconditionError(f"nonpositive diagonal entry in row ({j + 1},{i + 1})")
        left.append(Fraction(1) / d)
    step = GlcpScale(tuple(left), tuple(Fraction(1) for _ in range(inst.m.n)))
    return step.apply(inst), step


def pglcp_split_step(inst, j):
    """One P-GLCP block split (rows must already be diagonal-normalized)."""
    step = PSplit(j)
    out = step.apply(inst)
    return out, ReductionTrace(inst, (step,))


def pglcp_to_plcp(inst):
    """Iterate block splits down to an ordinary P-LCP of dimension 2m - n."""
    steps = []
    current, norm = normalize_diagonals(inst)
    steps.append(norm)
    while True:
        j = next((k for k, bk in enumerate(current.m.b) if bk > 1), None)
        if j is None:
            break
        step = PSplit(j)
        current = step.apply(current)
        steps.append(step)
    return current, ReductionTrace(inst, tuple(steps))


def kglcp_split_step(inst, j):
    """One stochastic K-GLCP block split plus the restoring rescale."""
    split = KSplit(j)
    raw = split.apply(inst)
    scale = split.scaling(inst)
    out = scale.apply(raw)
    return out, ReductionTrace(inst, (split, scale))


def _positive_rows_last(inst, j):
    """Permutation putting nonpositive-rhs rows first within block j."""
    qb = inst.q_block(j)
    order = [i for i, v in enumerate(qb) if v <= 0] + [i for i, v in enumerate(qb) if v > 0]
    return tuple(order)


def kglcp_to_binary(inst, rhs_order=False):
    """Split until every block has size at most two.

    With ``rhs_order`` set, rows with positive right-hand side are
    ordered last so they are split apart first; every new binary block
    carries a zero second-row rhs, so a nonpositive representative
    subvector survives into the final instance.
    """
    steps = []
    current = inst
    core.as_stochastic_k(inst.m)  # precondition
    if rhs_order:
        for j, bj in enumerate(inst.m.b):
            perm = _positive_rows_last(current, j)
            if perm != tuple(range(bj)):
                step = PermuteRows(j, perm)
                current = step.apply(current)
                steps.append(step)
    while True:
        j = next((k for k, bk in enumerate(current.m.b) if bk > 2), None)
        if j is None:
            break
        split = KSplit(j)
        raw = split.apply(current)
        scale = split.scaling(current)
        current = scale.apply(raw)
        steps.extend([split, scale])
    return current, ReductionTrace(inst, tuple(steps))


def nonpositive_representative(inst):
    """A selector with q_C <= 0, or None."""
    picks = []
    for j, bj in enumerate(inst.m.b):
        qb = inst.q_block(j)
        i = next((i for i in range(bj) if qb[i] <= 0), None)
        if i is None:
            return None
        picks.append(i)
    return tuple(picks)


def hiddenk_glcp_to_hiddenk_lcp(inst, x):
    """Pipeline: inflate by the witness, go binary, then eliminate back.

    Returns the square hidden K-LCP, a proper witness of its matrix, and
    the full trace. The witness comes for free: the eliminated
    representative pair (M_C, M_rest) is proper because the binary
    instance is stochastic K and hence has constant positive row sums.
    """
    steps = []
    step1 = HiddenkToK(tuple(tuple(linalg.to_fraction(v) for v in row) for row in x),
                       tuple(Fraction(1) for _ in range(inst.m.n)))
    current = step1.apply(inst)
    steps.append(step1)
    # Stochastic form via the witness (I, [Y|X]); no column scaling needed.
    row_sums = [sum(row) for _, _, row in current.m.rows()]
    if any(v <= 0 for v in row_sums):
        raise PreconditionError("extended matrix must have positive row sums")
    t = max(
        current.m.entry(j, i, j) / row_sums[core.flat_index(current.m.b, j, i)]
        for j, i, _ in current.m.rows()
    )
    left = tuple(Fraction(1) / (t * s) for s in row_sums)
    step2 = GlcpScale(left, tuple(Fraction(1) for _ in range(current.m.n)))
    current = step2.apply(current)
    steps.append(step2)
    binary, btrace = kglcp_to_binary(current, rhs_order=True)
    steps.extend(btrace.steps)
    current = binary
    picks = nonpositive_representative(current)
    assert picks is not None, "rhs ordering must leave a nonpositive representative"
    step_last = KToHiddenk(picks)
    current = step_last.apply(current)
    steps.append(step_last)
    # Witness of the final square matrix: X = M_C, with M_rest = (final M) X.
    x_final = core.representative_submatrix(binary.m, picks)
    trace = ReductionTrace(inst, tuple(steps))
    assert witness.verify_proper(current.m, x_final)
    return current, x_final, trace


def grid_lp_to_cube_lp(lp, x=None):
    """Grid-LP to Cube-LP through the dual hidden K pipeline."""
    inst = lpgrid.glcp_from_grid_lp(lp)
    if x is None:
        res = witness.compute_min_factor_witness(inst.m)
        if res is None:
            raise PreconditionError("matrix is not hidden K; not a Grid-LP")
        _, x = res
    steps = [GridLpToGlcp()]
    lcp, x_final, pipe = hiddenk_glcp_to_hiddenk_lcp(inst, x)
    steps.extend(pipe.steps)
    xt = linalg.transpose(linalg.mat(x_final))
    p_cube = linalg.solve(xt, [Fraction(1)] * lcp.m.n)
    last = GlcpToGridLp(tuple(p_cube))
    cube = last.apply(lcp)
    steps.append(last)
    return cube, x_final, ReductionTrace(lp, tuple(steps))


def mdp_to_binary_mdp(m):
    """Reduce an MDP to one with at most two actions per state."""
    d = mdp_mod.default_offset(m)
    steps = [MdpToKglcp(d)]
    inst, _ = mdp_mod.mdp_to_kglcp(m, d)
    binary, btrace = kglcp_to_binary(inst, rhs_order=False)
    steps.extend(btrace.steps)
    steps.append(KglcpToMdp())
    out, _ = mdp_mod.kglcp_to_mdp(binary)
    return out, ReductionTrace(m, tuple(steps))
