"""Two-player discounted stochastic games with perfect information.

Each state is controlled by MAX or MIN; the optimality system replaces
the Bellman max with a min on MIN states and has a unique solution.
Besides exact solvers (strategy iteration with an inner best-response
MDP solve, plus joint-policy brute force), the module carries both
P-GLCP formulations, the inverse construction, the signed-USO view, and
the action-splitting reduction to binary games.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import core, glcp as glcp_mod, linalg, mdp as mdp_mod, uso as uso_mod, witness
from .errors import DimensionError, PreconditionError

MAX, MIN = "max", "min"


@dataclass(frozen=True)
class StochasticGame:
    p: core.BlockMatrix
    r: tuple
    gamma: Fraction
    owner: tuple  # "max"/"min" per state

    def __post_init__(self):
        base = mdp_mod.DiscountedMDP(self.p, self.r, self.gamma)  # reuse validation
        owner = tuple(self.owner)
        if len(owner) != self.p.n or any(o not in (MAX, MIN) for o in owner):
            raise DimensionError("owner must assign 'max' or 'min' to every state")
        object.__setattr__(self, "r", base.r)
        object.__setattr__(self, "gamma", base.gamma)
        object.__setattr__(self, "owner", owner)

    @property
    def n(self):
        return self.p.n

    @property
    def a(self):
        return self.p.b

    def reward(self, j, i):
        return self.r[core.flat_index(self.p.b, j, i)]

    def as_mdp(self):
        return mdp_mod.DiscountedMDP(self.p, self.r, self.gamma)

    def s_min(self):
        return frozenset(j for j, o in enumerate(self.owner) if o == MIN)


def action_value(g, j, i, v):
    return g.reward(j, i) + g.gamma * linalg.dot(list(g.p.row(j, i)), list(v))


def best_value(g, j, v):
    vals = [action_value(g, j, i, v) for i in range(g.a[j])]
    return max(vals) if g.owner[j] == MAX else min(vals)


def check_optimality(g, v):
    """Exact check of the max equations on MAX states, min on MIN states."""
    v = linalg.vec(v)
    if len(v) != g.n:
        raise DimensionError("value vector length must equal the state count")
    return all(best_value(g, j, v) == v[j] for j in range(g.n))


def optimal_action_sets(g, v):
    out = []
    for j in range(g.n):
        vals = [action_value(g, j, i, v) for i in range(g.a[j])]
        best = max(vals) if g.owner[j] == MAX else min(vals)
        out.append(tuple(i for i, q in enumerate(vals) if q == best))
    return tuple(out)


def joint_policy_value(g, pi):
    return mdp_mod.policy_value(g.as_mdp(), pi)


def solve_brute_force(g):
    """Evaluate every joint policy; keep the one passing the optimality check."""
    for pi in product(*(range(aj) for aj in g.a)):
        v = joint_policy_value(g, pi)
        if check_optimality(g, v):
            return optimal_action_sets(g, v), v
    raise AssertionError("optimality system must have a solution")


def _negated_response_mdp(g, sigma):
    """Single-player MDP whose optimum is the MIN best response to sigma.

    MAX states keep only their fixed action; all rewards are negated so
    the minimizing player becomes a maximizer.
    """
    blocks = []
    rewards = []
    for j in range(g.n):
        rows = range(g.a[j]) if g.owner[j] == MIN else [sigma[j]]
        blocks.append([list(g.p.row(j, i)) for i in rows])
        rewards.extend(-g.reward(j, i) for i in rows)
    return mdp_mod.DiscountedMDP(core.BlockMatrix(blocks), tuple(rewards), g.gamma)


def strategy_iteration(g):
    """MAX policy improvement against an exact MIN best response.

    Returns a jointly optimal policy and the unique game values; the
    result always passes check_optimality.
    """
    sigma = tuple(0 for _ in range(g.n))
    while True:
        response = _negated_response_mdp(g, sigma)
        _, neg_v = mdp_mod.solve_optimal(response, method="policy-iteration")
        v = tuple(-x for x in neg_v)
        improved = list(sigma)
        for j in range(g.n):
            if g.owner[j] != MAX:
                continue
            vals = [action_value(g, j, i, v) for i in range(g.a[j])]
            best = max(vals)
            if vals[sigma[j]] < best:
                improved[j] = vals.index(best)
        improved = tuple(improved)
        if improved == sigma:
            break
        sigma = improved
    sets = optimal_action_sets(g, v)
    joint = tuple(sets[j][0] if g.owner[j] == MIN else sigma[j] for j in range(g.n))
    assert check_optimality(g, v)
    return joint, v


def signature(g):
    return tuple(1 if o == MAX else -1 for o in g.owner)


def _pad_singleton_actions(g):
    """Duplicate the sole action of any single-action state (harmless)."""
    if all(aj >= 2 for aj in g.a):
        return g
    blocks = []
    rewards = []
    for j in range(g.n):
        rows = [list(g.p.row(j, i)) for i in range(g.a[j])]
        rs = [g.reward(j, i) for i in range(g.a[j])]
        if g.a[j] == 1:
            rows.append(rows[0][:])
            rs.append(rs[0])
        blocks.append(rows)
        rewards.extend(rs)
    return StochasticGame(core.BlockMatrix(blocks), tuple(rewards), g.gamma, g.owner)


@dataclass(frozen=True)
class SplitFormulation:
    """P-GLCP(SMS, Sq) from splitting off the last action of every state."""

    instance: glcp_mod.GLCPInstance
    signs: tuple
    p_c: tuple  # rows of P selected by C (n x n)
    r_c: tuple
    gamma: Fraction


def game_to_pglcp_split(g):
    """Eliminate v through the last action of every state.

    M := (E - gamma P_rest)(I - gamma P_C)^{-1} is hidden K of type a - 1
    and the game's problem is the P-GLCP(SMS, Sq) with q = M r_C - r_rest.
    """
    g = _pad_singleton_actions(g)
    signs = signature(g)
    n = g.n
    c_rows = [list(g.p.row(j, g.a[j] - 1)) for j in range(n)]
    i_minus = [
        [Fraction(int(j == k)) - g.gamma * c_rows[j][k] for k in range(n)] for j in range(n)
    ]
    inv = linalg.inverse(i_minus)
    assert inv is not None  # I - gamma P_C is a K-matrix
    e = core.eb(tuple(aj - 1 for aj in g.a))
    m_blocks = []
    q = []
    r_c = [g.reward(j, g.a[j] - 1) for j in range(n)]
    for j in range(n):
        rows = []
        for i in range(g.a[j] - 1):
            lhs = [
                e.entry(j, i, k) - g.gamma * g.p.entry(j, i, k) for k in range(n)
            ]
            row = linalg.mat_vec(linalg.transpose(inv), lhs)  # lhs * inv
            rows.append(row)
            q.append(linalg.dot(row, r_c) - g.reward(j, i))
        m_blocks.append(rows)
    m = core.BlockMatrix(m_blocks)
    signed_m = core.signed_conjugate(m, signs)
    signed_q = []
    pos = 0
    for j in range(n):
        for _ in range(g.a[j] - 1):
            signed_q.append(signs[j] * q[pos])
            pos += 1
    inst = glcp_mod.GLCPInstance(signed_m, tuple(signed_q))
    return SplitFormulation(inst, signs, tuple(tuple(r) for r in c_rows), tuple(r_c), g.gamma)


def recover_values_split(form, z):
    """v = (I - gamma P_C)^{-1} (S z + r_C)."""
    n = len(form.signs)
    rhs = [form.signs[j] * linalg.to_fraction(z[j]) + form.r_c[j] for j in range(n)]
    i_minus = [
        [Fraction(int(j == k)) - form.gamma * form.p_c[j][k] for k in range(n)]
        for j in range(n)
    ]
    v = linalg.solve(i_minus, rhs)
    return tuple(v)


@dataclass(frozen=True)
class BoundedFormulation:
    """P-GLCP(SMS, Sq) from bounding |v| by h = d/(1 - gamma)."""

    instance: glcp_mod.GLCPInstance
    signs: tuple
    h: Fraction


def game_to_pglcp_bounded(g, d=None):
    """Substitute z_j = s_j (v_j + s_j h) >= 0 for h above the value bound."""
    if d is None:
        d = max(abs(x) for x in g.r) + 1
    d = linalg.to_fraction(d)
    if d <= max(abs(x) for x in g.r):
        raise PreconditionError("d must exceed the largest absolute reward")
    h = d / (1 - g.gamma)
    signs = signature(g)
    e = core.eb(g.a)
    m = core.BlockMatrix(
        [
            [
                [e.entry(j, i, k) - g.gamma * g.p.entry(j, i, k) for k in range(g.n)]
                for i in range(g.a[j])
            ]
            for j in range(g.n)
        ]
    )
    q = []
    for j, i, row in g.p.rows():
        val = -g.reward(j, i) + g.gamma * h * sum(
            row[k] * signs[k] for k in range(g.n)
        ) - signs[j] * h
        q.append(val)
    signed_m = core.signed_conjugate(m, signs)
    signed_q = []
    pos = 0
    for j in range(g.n):
        for _ in range(g.a[j]):
            signed_q.append(signs[j] * q[pos])
            pos += 1
    inst = glcp_mod.GLCPInstance(signed_m, tuple(signed_q))
    return BoundedFormulation(inst, signs, h)


def recover_values_bounded(form, z):
    """v_j = z_j - h on MAX states, h - z_j on MIN states."""
    return tuple(
        linalg.to_fraction(z[j]) - form.h if s == 1 else form.h - linalg.to_fraction(z[j])
        for j, s in enumerate(form.signs)
    )


def pglcp_to_game(inst, signs, x):
    """Game of type a + 1 whose split formulation reproduces the input USO.

    The input is a P-GLCP(S M S, S q) with hidden K core M witnessed by
    X. The witness stochastic form supplies transitions; rewards are
    chosen with r_C = 0 so that r_rest = -Lq.
    """
    signs = tuple(signs)
    if len(signs) != inst.m.n or any(s not in (1, -1) for s in signs):
        raise PreconditionError("signature entries must be +1 or -1")
    m_core = core.signed_conjugate(inst.m, signs)
    q_core = []
    pos = 0
    for j, bj in enumerate(inst.m.b):
        for _ in range(bj):
            q_core.append(signs[j] * inst.q[pos])
            pos += 1
    sc, form = witness.witness_stochastic_form(m_core, x)
    blocks = []
    rewards = []
    pos = 0
    for j, bj in enumerate(inst.m.b):
        rows = []
        for i in range(bj + 1):
            rows.append(list(form.p.row(j, i)))
            if i < bj:
                rewards.append(-sc.left[pos] * q_core[pos])
                pos += 1
            else:
                rewards.append(Fraction(0))
        blocks.append(rows)
    owner = tuple(MAX if s == 1 else MIN for s in signs)
    return StochasticGame(core.BlockMatrix(blocks), tuple(rewards), form.gamma, owner)


def signed_uso_from_game(g):
    """The game's USO plus the direction set F = S_min.

    Reorienting along F recovers the LP-USO of the unsigned hidden K
    core, so the game is exactly a signed LP-USO sink problem.
    """
    form = game_to_pglcp_split(g)
    phi = uso_mod.uso_from_glcp(form.instance)
    return phi, g.s_min()


@dataclass(frozen=True)
class SplitRecord:
    """Bookkeeping for one action split, replayable for value recovery."""

    state: int
    owner: str
    delta: Fraction
    n_before: int


def game_split_step(g, j):
    """Split the last action of state j into a fresh two-action state.

    The new state n+1 inherits state j's owner, the discount rises to
    delta = (1 + gamma)/2, and transitions into state j are redirected to
    the new state, which carries the old value. Value recovery drops the
    reduced state's auxiliary value and reads v_j from the new state.
    """
    if g.a[j] < 2:
        raise PreconditionError("state has a single action; nothing to split")
    gamma = g.gamma
    delta = (1 + gamma) / 2
    n = g.n
    half = gamma / (2 * delta)
    blocks = []
    rewards = []
    for k in range(n):
        if k == j:
            # Reduced state: remaining actions, self-loop bonus 1/delta - 1,
            # old self-transitions redirected to the new state.
            rows = []
            for i in range(g.a[j] - 1):
                row = [gamma / delta * g.p.entry(j, i, t) for t in range(n)] + [Fraction(0)]
                row[n] = gamma / delta * g.p.entry(j, i, j)
                row[j] = 1 / delta - 1
                rows.append(row)
                rewards.append(g.reward(j, i))
            blocks.append(rows)
        else:
            rows = []
            for i in range(g.a[k]):
                row = [half * g.p.entry(k, i, t) for t in range(n)] + [Fraction(0)]
                row[n] = half * g.p.entry(k, i, j)
                row[j] = Fraction(0)
                row[k] += Fraction(1) / (2 * delta)
                rows.append(row)
                rewards.append(g.reward(k, i) / 2)
            blocks.append(rows)
    split_row = [half * g.p.entry(j, g.a[j] - 1, t) for t in range(n)] + [Fraction(0)]
    split_row[n] = half * g.p.entry(j, g.a[j] - 1, j) + Fraction(1) / (2 * delta)
    split_row[j] = Fraction(0)
    jump_row = [Fraction(0)] * (n + 1)
    jump_row[j] = Fraction(1)
    blocks.append([split_row, jump_row])
    rewards.append(g.reward(j, g.a[j] - 1) / 2)
    rewards.append(Fraction(0))
    owner = g.owner + (g.owner[j],)
    out = StochasticGame(core.BlockMatrix(blocks), tuple(rewards), delta, owner)
    return out, SplitRecord(j, g.owner[j], delta, n)


def recover_split_values(record, z):
    """Undo one split: drop the auxiliary value, take v_j from the new state."""
    z = linalg.vec(z)
    v = list(z[: record.n_before])
    v[record.state] = z[record.n_before]
    return tuple(v)


def game_to_binary(g):
    """Split until every state has at most two actions."""
    records = []
    current = g
    while True:
        j = next((k for k in range(current.n) if current.a[k] > 2), None)
        if j is None:
            return current, records
        current, rec = game_split_step(current, j)
        records.append(rec)


def recover_game_values(records, v_final):
    v = tuple(linalg.vec(v_final))
    for rec in reversed(records):
        v = recover_split_values(rec, v)
    return v
