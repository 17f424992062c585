"""Discounted Markov decision processes with exact rational data.

States j have a_j actions; choosing action i in state j yields reward
r^j_i and moves to state k with probability p^j_{ik}. Transition rows
are stored as a block matrix of type a, rewards as a flat vector in row
order. Everything is solved exactly: policy evaluation is a rational
linear solve, and both policy iteration and brute-force enumeration
return the same unique optimal values.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import ceil, log

from . import core, glcp as glcp_mod, linalg
from .errors import DimensionError, PreconditionError


@dataclass(frozen=True)
class DiscountedMDP:
    p: core.BlockMatrix  # transitions, rowstochastic
    r: tuple  # rewards, length m
    gamma: Fraction

    def __post_init__(self):
        r = tuple(linalg.to_fraction(v) for v in self.r)
        gamma = linalg.to_fraction(self.gamma)
        if len(r) != self.p.m:
            raise DimensionError("reward length must match the action count")
        if not 0 <= gamma < 1:
            raise PreconditionError("discount factor must lie in [0, 1)")
        for j, i, row in self.p.rows():
            if any(v < 0 for v in row) or sum(row) != 1:
                raise PreconditionError(f"transition row ({j + 1},{i + 1}) is not stochastic")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "gamma", gamma)

    @property
    def n(self):
        return self.p.n

    @property
    def a(self):
        return self.p.b

    def reward(self, j, i):
        return self.r[core.flat_index(self.p.b, j, i)]


def policies(mdp):
    return product(*(range(aj) for aj in mdp.a))


def policy_value(mdp, pi):
    """Solve (I - gamma P_pi) v = r_pi exactly; always nonsingular."""
    core.check_selector(mdp.p, pi)
    p_pi = core.representative_submatrix(mdp.p, pi)
    a = [
        [Fraction(int(j == k)) - mdp.gamma * p_pi[j][k] for k in range(mdp.n)]
        for j in range(mdp.n)
    ]
    rhs = [mdp.reward(j, pi[j]) for j in range(mdp.n)]
    v = linalg.solve(a, rhs)
    assert v is not None
    return tuple(v)


def action_value(mdp, j, i, v):
    return mdp.reward(j, i) + mdp.gamma * linalg.dot(list(mdp.p.row(j, i)), list(v))


def bellman(mdp, v):
    return tuple(max(action_value(mdp, j, i, v) for i in range(mdp.a[j])) for j in range(mdp.n))


def argmax_actions(mdp, v):
    """Per-state tuple of all maximizing actions with respect to v."""
    out = []
    for j in range(mdp.n):
        qs = [action_value(mdp, j, i, v) for i in range(mdp.a[j])]
        best = max(qs)
        out.append(tuple(i for i, q in enumerate(qs) if q == best))
    return tuple(out)


def is_optimal(mdp, v):
    return bellman(mdp, v) == tuple(v)


def solve_optimal(mdp, method="policy-iteration"):
    """Optimal action sets and the unique optimal values.

    ``brute-force`` evaluates every policy and keeps the value vector
    satisfying the optimality equations; ``policy-iteration`` starts from
    the least-index policy and switches to greedy actions until a
    fixpoint. Both agree exactly.
    """
    if method == "brute-force":
        v_star = None
        for pi in policies(mdp):
            v = policy_value(mdp, pi)
            if is_optimal(mdp, v):
                v_star = v
                break
        assert v_star is not None, "optimality equations must have a solution"
    elif method == "policy-iteration":
        pi = tuple(0 for _ in range(mdp.n))
        while True:
            v = policy_value(mdp, pi)
            sets = argmax_actions(mdp, v)
            nxt = tuple(pi[j] if pi[j] in sets[j] else sets[j][0] for j in range(mdp.n))
            if nxt == pi:
                v_star = v
                break
            pi = nxt
    else:
        raise PreconditionError(f"unknown method {method!r}")
    return argmax_actions(mdp, v_star), v_star


def value_iteration(mdp, eps):
    """Iterate the Bellman operator from 0 until within eps of v*.

    Stops when successive iterates are within eps (1 - gamma) / (2 gamma)
    in the max norm, or at the a-priori iteration bound derived from the
    contraction rate; both guarantee the eps bound. Iterates are exact
    rationals, so denominators grow with the iteration count.
    """
    eps = linalg.to_fraction(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    v = tuple(Fraction(0) for _ in range(mdp.n))
    if mdp.gamma == 0:
        return bellman(mdp, v)
    r_max = max(abs(x) for x in mdp.r)
    if r_max == 0:
        return v
    threshold = eps * (1 - mdp.gamma) / (2 * mdp.gamma)
    bound = float(eps * (1 - mdp.gamma) / r_max)
    max_iters = max(1, ceil(log(bound) / log(float(mdp.gamma))) + 1)
    for _ in range(max_iters):
        nxt = bellman(mdp, v)
        if max(abs(a - b) for a, b in zip(nxt, v)) <= threshold:
            return nxt
        v = nxt
    return v


def default_offset(mdp):
    return min(mdp.r) - 1


def mdp_to_kglcp(mdp, d=None):
    """Formulate as the stochastic K-GLCP(E(a) - gamma P, -r + d).

    The substitution z_j = v_j - d/(1 - gamma) needs d strictly below the
    minimum reward so that z stays nonnegative and q strictly negative.
    """
    d = default_offset(mdp) if d is None else linalg.to_fraction(d)
    if d >= min(mdp.r):
        raise PreconditionError("offset must be strictly below the minimum reward")
    e = core.eb(mdp.a)
    m = core.BlockMatrix(
        [
            [
                [e.entry(j, i, k) - mdp.gamma * mdp.p.entry(j, i, k) for k in range(mdp.n)]
                for i in range(mdp.a[j])
            ]
            for j in range(mdp.n)
        ]
    )
    q = tuple(d - x for x in mdp.r)
    return glcp_mod.GLCPInstance(m, q), d


def kglcp_to_mdp(inst):
    """Read a stochastic K-GLCP back as an MDP with offset 0 (r = -q)."""
    form = core.as_stochastic_k(inst.m)
    r = tuple(-x for x in inst.q)
    return DiscountedMDP(form.p, r, form.gamma), Fraction(0)


def values_from_glcp_solution(z, d, gamma):
    off = linalg.to_fraction(d) / (1 - linalg.to_fraction(gamma))
    return tuple(linalg.to_fraction(v) + off for v in z)


@dataclass(frozen=True)
class StochasticFormLP:
    """max r^T y subject to M^T y = p, y >= 0 (equality Grid-LP form)."""

    m: core.BlockMatrix
    p: tuple
    r: tuple


def mdp_to_grid_lp(mdp, p=None):
    p = [Fraction(1)] * mdp.n if p is None else linalg.vec(p)
    if len(p) != mdp.n or any(v <= 0 for v in p):
        raise PreconditionError("p must be a positive n-vector")
    inst, _ = mdp_to_kglcp(mdp, default_offset(mdp))
    return StochasticFormLP(inst.m, tuple(p), mdp.r)


def solve_stochastic_form_lp(lp):
    """Enumerate the maximal complementary bases of M^T y = p.

    Returns (basis picks, y, value) for the reduced-cost-optimal basis.
    """
    best = None
    for picks in core.selectors(lp.m.b):
        m_b = core.representative_submatrix(lp.m, picks)
        y_b = linalg.solve(linalg.transpose(m_b), list(lp.p))
        if y_b is None or any(v < 0 for v in y_b):
            continue
        r_b = [lp.r[core.flat_index(lp.m.b, j, i)] for j, i in enumerate(picks)]
        dual = linalg.solve(m_b, r_b)  # M_B^T y = p basis; duals from M_B w = r_B
        if dual is None:
            continue
        optimal = True
        for j, i, row in lp.m.rows():
            if i == picks[j]:
                continue
            rc = lp.r[core.flat_index(lp.m.b, j, i)] - linalg.dot(list(row), dual)
            if rc > 0:
                optimal = False
                break
        if optimal:
            y = [Fraction(0)] * lp.m.m
            for j, i in enumerate(picks):
                y[core.flat_index(lp.m.b, j, i)] = y_b[j]
            value = linalg.dot(list(lp.r), y)
            best = (tuple(picks), tuple(y), value)
            break
    if best is None:
        raise PreconditionError("no optimal basis; input is not in stochastic form")
    return best


def reduce_discount(mdp):
    """Shrink the discount factor while preserving the optimal policies.

    With f the least diagonal transition probability, the rescaled MDP
    ((gamma/kappa)(P - f E), r, kappa/lambda) for kappa = gamma (1 - f)
    and lambda = 1 - gamma f induces the same complementarity problem up
    to row scaling. When kappa = 0 the new factor is 0 and transitions
    are irrelevant, so uniform rows are emitted (gamma = 0 inputs are
    returned unchanged).
    """
    if mdp.gamma == 0:
        return mdp
    f = min(mdp.p.entry(j, i, j) for j, i, _ in mdp.p.rows())
    kappa = mdp.gamma * (1 - f)
    lam = 1 - mdp.gamma * f
    if kappa == 0:
        return DiscountedMDP(core.uniform_rowstochastic(mdp.a), mdp.r, Fraction(0))
    e = core.eb(mdp.a)
    scale = mdp.gamma / kappa
    p = core.BlockMatrix(
        [
            [
                [scale * (mdp.p.entry(j, i, k) - f * e.entry(j, i, k)) for k in range(mdp.n)]
                for i in range(mdp.a[j])
            ]
            for j in range(mdp.n)
        ]
    )
    return DiscountedMDP(p, mdp.r, kappa / lam)
