"""Shared fixtures and seeded random instance generators.

All generators are deterministic given the Random instance, produce
small rationals, and bias toward the matrix classes under test
(diagonal dominance gives the P/K property outright; predicates still
verify it).
"""

import random
from fractions import Fraction

import pytest

from gridcube import core, games, glcp, linalg, mdp, uso


@pytest.fixture
def rng():
    return random.Random(20240817)


# fixture matrices -----------------------------------------------------------


@pytest.fixture
def k1():
    """Block K-matrix of type (2, 1)."""
    return core.BlockMatrix([[["1", "-1/2"], ["1", "0"]], [["-1/2", "1"]]])


@pytest.fixture
def h1():
    """Square hidden K-matrix that is not Z."""
    return core.from_square([[1, 3], [0, 1]])


@pytest.fixture
def h1_witness():
    return [[4, -3], [0, 1]]


@pytest.fixture
def mdp1():
    """One state, two self-loop actions with rewards 1 and 2, gamma 1/2."""
    return mdp.DiscountedMDP(core.BlockMatrix([[["1"], ["1"]]]), ["1", "2"], "1/2")


@pytest.fixture
def mdp1_glcp():
    return glcp.GLCPInstance(core.BlockMatrix([[["1/2"], ["1/2"]]]), ["-1", "-2"])


# random generators ----------------------------------------------------------


def rand_fraction(rng, lo=-3, hi=3, dens=(1, 2, 3)):
    d = rng.choice(dens)
    return Fraction(rng.randint(lo * d, hi * d), d)


def rand_pos_fraction(rng, hi=3, dens=(1, 2, 3)):
    d = rng.choice(dens)
    return Fraction(rng.randint(1, hi * d), d)


def rand_dominant_row(rng, n, j, z_pattern=False):
    """Row with positive diagonal strictly dominating the off-diagonals."""
    diag = Fraction(rng.randint(2, 6), rng.choice((1, 2)))
    row = [Fraction(0)] * n
    row[j] = diag
    if n > 1:
        budget = diag / 2
        for k in range(n):
            if k == j:
                continue
            x = Fraction(rng.randint(0, 4), rng.choice((2, 3, 4))) * budget / 4
            row[k] = -x if (z_pattern or rng.random() < 0.5) else x
    return row


def rand_p_matrix(rng, b):
    n = len(b)
    return core.BlockMatrix(
        [[rand_dominant_row(rng, n, j) for _ in range(bj)] for j, bj in enumerate(b)]
    )


def rand_k_matrix(rng, b):
    n = len(b)
    return core.BlockMatrix(
        [[rand_dominant_row(rng, n, j, z_pattern=True) for _ in range(bj)] for j, bj in enumerate(b)]
    )


def rand_stochastic_row(rng, n):
    weights = [rng.randint(0, 3) for _ in range(n)]
    if sum(weights) == 0:
        weights[rng.randrange(n)] = 1
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def rand_stochastic_k(rng, b, gamma):
    """Instance matrix E(b) - gamma * P for a random rowstochastic P."""
    n = len(b)
    p = core.BlockMatrix([[rand_stochastic_row(rng, n) for _ in range(bj)] for bj in b])
    gamma = Fraction(gamma)
    e = core.eb(b)
    return core.BlockMatrix(
        [
            [
                [e.entry(j, i, k) - gamma * p.entry(j, i, k) for k in range(n)]
                for i in range(b[j])
            ]
            for j in range(n)
        ]
    )


def rand_hidden_k(rng, b):
    """Hidden K-matrix M = Y X^{-1} with proper witness X.

    X and Y are diagonally dominant Z-matrices, so [Y|X] is a K-matrix
    with positive row sums and (X, Y) is proper by construction.
    """
    n = len(b)
    x = [rand_dominant_row(rng, n, j, z_pattern=True) for j in range(n)]
    y = core.BlockMatrix(
        [[rand_dominant_row(rng, n, j, z_pattern=True) for _ in range(bj)] for j, bj in enumerate(b)]
    )
    x_inv = linalg.inverse(x)
    assert x_inv is not None
    m = core.BlockMatrix(
        [
            [linalg.mat_vec(linalg.transpose(x_inv), list(row)) for row in block]
            for block in y.blocks
        ]
    )
    return m, x


def rand_q(rng, m, lo=-3, hi=3):
    out = []
    for _ in range(m):
        v = rand_fraction(rng, lo, hi)
        while v == 0:
            v = rand_fraction(rng, lo, hi)
        out.append(v)
    return tuple(out)


def nondegenerate_instance(rng, m, q_gen=None, tries=60):
    """A GLCP(m, q) whose full orientation is defined (no zero signs)."""
    for _ in range(tries):
        q = q_gen(rng) if q_gen else rand_q(rng, m.m)
        inst = glcp.GLCPInstance(m, q)
        try:
            uso.uso_from_glcp(inst)
            return inst
        except Exception:
            continue
    raise AssertionError("could not generate a nondegenerate instance")


def rand_mdp(rng, n, max_actions, gamma):
    b = tuple(rng.randint(1, max_actions) for _ in range(n))
    p = core.BlockMatrix([[rand_stochastic_row(rng, n) for _ in range(bj)] for bj in b])
    r = tuple(rand_fraction(rng) for _ in range(sum(b)))
    return mdp.DiscountedMDP(p, r, gamma)


def rand_game(rng, n, max_actions, gamma, owners=None):
    base = rand_mdp(rng, n, max_actions, gamma)
    if owners is None:
        owners = tuple(rng.choice((games.MAX, games.MIN)) for _ in range(n))
    return games.StochasticGame(base.p, base.r, base.gamma, owners)
