from fractions import Fraction as F

import pytest

from gridcube import core, games, glcp, linalg, mdp, uso, witness
from gridcube.errors import PreconditionError
from conftest import rand_game, rand_hidden_k, rand_mdp, rand_q


@pytest.fixture
def game1():
    """MDP1 viewed as an all-MAX game."""
    return games.StochasticGame(core.BlockMatrix([[["1"], ["1"]]]), ["1", "2"], "1/2", ("max",))


@pytest.fixture
def game_min():
    return games.StochasticGame(core.BlockMatrix([[["1"], ["1"]]]), ["1", "2"], "1/2", ("min",))


@pytest.fixture
def mixed_game():
    """State 1 MAX, state 2 MIN, deterministic transitions."""
    p = core.BlockMatrix(
        [[["0", "1"], ["1", "0"]], [["1", "0"], ["0", "1"]]]
    )
    return games.StochasticGame(p, ["2", "0", "1", "-1"], "1/2", ("max", "min"))


def test_check_optimality(game1):
    assert games.check_optimality(game1, [4])
    assert not games.check_optimality(game1, [2])


def test_check_optimality_all_min(game_min):
    # single MIN player: optimum is the argmin policy value
    v = mdp.policy_value(game_min.as_mdp(), (0,))
    assert games.check_optimality(game_min, v)
    assert v == (F(2),)


def test_strategy_iteration_single_player(game1, game_min, rng):
    _, v = games.strategy_iteration(game1)
    assert v == (F(4),)
    _, v_min = games.strategy_iteration(game_min)
    assert v_min == (F(2),)
    m = rand_mdp(rng, 3, 3, F(1, 2))
    g = games.StochasticGame(m.p, m.r, m.gamma, ("max",) * 3)
    _, vg = games.strategy_iteration(g)
    _, vm = mdp.solve_optimal(m)
    assert vg == vm


def test_strategy_iteration_mixed(mixed_game):
    joint, v = games.strategy_iteration(mixed_game)
    sets, v_b = games.solve_brute_force(mixed_game)
    assert v == v_b
    assert games.check_optimality(mixed_game, v)
    assert all(joint[j] in sets[j] for j in range(2))


def test_strategy_iteration_gamma_zero(rng):
    g = rand_game(rng, 3, 3, 0)
    _, v = games.strategy_iteration(g)
    for j in range(3):
        rewards = [g.reward(j, i) for i in range(g.a[j])]
        expect = max(rewards) if g.owner[j] == games.MAX else min(rewards)
        assert v[j] == expect


def test_strategy_iteration_random(rng):
    for _ in range(10):
        g = rand_game(rng, rng.randint(1, 3), 3, F(rng.randint(1, 9), 10))
        _, v = games.strategy_iteration(g)
        _, v_b = games.solve_brute_force(g)
        assert v == v_b


def test_split_formulation_all_max_is_hidden_k(rng):
    g = rand_game(rng, 2, 3, F(1, 2), owners=("max", "max"))
    form = games.game_to_pglcp_split(g)
    assert form.signs == (1, 1)
    assert witness.is_hidden_k(form.instance.m) is not None
    assert core.is_p_matrix(form.instance.m)


def test_split_formulation_mdp1(game1):
    form = games.game_to_pglcp_split(game1)
    sols = glcp.brute_force_solve(form.instance)
    assert len(sols) == 1
    v = games.recover_values_split(form, sols[0][1].z)
    assert v == (F(4),)


def test_split_formulation_mixed(mixed_game):
    form = games.game_to_pglcp_split(mixed_game)
    assert core.is_p_matrix(form.instance.m)
    sols = glcp.brute_force_solve(form.instance)
    assert len({s.z for _, s in sols}) == 1
    v = games.recover_values_split(form, sols[0][1].z)
    _, v_star = games.strategy_iteration(mixed_game)
    assert v == v_star
    assert games.check_optimality(mixed_game, v)


def test_split_formulation_pads_single_actions(rng):
    g = rand_game(rng, 2, 1, F(1, 2))
    form = games.game_to_pglcp_split(g)
    sols = glcp.brute_force_solve(form.instance)
    v = games.recover_values_split(form, sols[0][1].z)
    _, v_star = games.strategy_iteration(g)
    assert v == v_star


def test_bounded_formulation_mdp1(game1):
    form = games.game_to_pglcp_bounded(game1, 3)
    assert form.h == 6
    sols = glcp.brute_force_solve(form.instance)
    assert len(sols) == 1
    assert sols[0][1].z == (F(10),)
    v = games.recover_values_bounded(form, sols[0][1].z)
    assert v == (F(4),)


def test_bounded_formulation_all_min(game_min):
    form = games.game_to_pglcp_bounded(game_min, 3)
    sols = glcp.brute_force_solve(form.instance)
    v = games.recover_values_bounded(form, sols[0][1].z)
    assert v == (F(2),)
    # z = h - v on MIN states
    assert sols[0][1].z == (form.h - 2,)


def test_bounded_formulation_gamma_zero(rng):
    g = rand_game(rng, 3, 2, 0)
    form = games.game_to_pglcp_bounded(g)
    sols = glcp.brute_force_solve(form.instance)
    v = games.recover_values_bounded(form, sols[0][1].z)
    _, v_star = games.strategy_iteration(g)
    assert v == v_star


def test_bounded_formulation_is_p(mixed_game):
    form = games.game_to_pglcp_bounded(mixed_game)
    assert core.is_p_matrix(form.instance.m)
    with pytest.raises(PreconditionError):
        games.game_to_pglcp_bounded(mixed_game, 1)


def test_bounded_recovers_strategy_iteration(rng):
    for _ in range(8):
        g = rand_game(rng, 2, 2, F(1, 2))
        form = games.game_to_pglcp_bounded(g)
        sols = glcp.brute_force_solve(form.instance)
        assert len({s.z for _, s in sols}) == 1
        v = games.recover_values_bounded(form, sols[0][1].z)
        _, v_star = games.strategy_iteration(g)
        assert v == v_star


def test_pglcp_to_game_identity_core():
    inst = glcp.GLCPInstance(core.from_square([[1, 0], [0, 1]]), [1, -1])
    g = games.pglcp_to_game(inst, (1, -1), linalg.identity(2))
    assert g.gamma == 0
    assert g.a == (2, 2)
    assert g.owner == (games.MAX, games.MIN)


def test_pglcp_to_game_round_trip_uso(h1, h1_witness, rng):
    for signs in [(1, 1), (1, -1), (-1, 1), (-1, -1)]:
        signed_m = core.signed_conjugate(h1, signs)
        q = rand_q(rng, 2)
        signed_q = tuple(signs[j] * q[j] for j in range(2))
        inst = glcp.GLCPInstance(signed_m, signed_q)
        try:
            input_uso = uso.uso_from_glcp(inst)
        except Exception:
            continue
        g = games.pglcp_to_game(inst, signs, h1_witness)
        form = games.game_to_pglcp_split(g)
        assert uso.uso_from_glcp(form.instance) == input_uso
        # solving the game solves the signed USO sink problem
        _, v = games.strategy_iteration(g)
        assert games.check_optimality(g, v)


def test_signed_uso_single_player(game1, game_min):
    phi, f = games.signed_uso_from_game(game1)
    assert f == frozenset()
    phi_min, f_min = games.signed_uso_from_game(game_min)
    assert f_min == frozenset({0})


def test_signed_uso_reorient_is_lp_uso(mixed_game):
    phi, f = games.signed_uso_from_game(mixed_game)
    assert f == frozenset({1})
    form = games.game_to_pglcp_split(mixed_game)
    unsigned = glcp.GLCPInstance(
        core.signed_conjugate(form.instance.m, form.signs),
        tuple(
            form.signs[j] * v
            for j, block in enumerate(form.instance.m.b)
            for v in form.instance.q_block(j)
        ),
    )
    assert uso.reorient(phi, f) == uso.uso_from_glcp(unsigned)
    assert witness.is_hidden_k(unsigned.m) is not None


def test_signed_uso_sink_is_optimal_policy(mixed_game):
    phi, _ = games.signed_uso_from_game(mixed_game)
    sink = uso.global_sink(phi)
    joint, v = games.strategy_iteration(mixed_game)
    sets = games.optimal_action_sets(mixed_game, v)
    assert all(sink[j] in sets[j] for j in range(mixed_game.n))


def test_game_split_step_delta(game1):
    out, rec = games.game_split_step(game1, 0)
    assert rec.delta == F(3, 4)
    assert out.gamma == F(3, 4)
    assert out.a == (1, 2)
    assert out.owner == ("max", "max")
    # discount grows by exactly (1 - gamma)/2
    assert rec.delta - game1.gamma == (1 - game1.gamma) / 2


def test_split_row_sum_identities():
    for gamma in [F(0), F(1, 3), F(1, 2), F(9, 10)]:
        delta = (1 + gamma) / 2
        assert gamma / (2 * delta) + 1 / (2 * delta) == 1
        assert gamma / delta + (1 / delta - 1) == 1


def test_game_split_recovers_values(game1):
    out, rec = games.game_split_step(game1, 0)
    _, v = games.strategy_iteration(out)
    assert games.recover_split_values(rec, v) == (F(4),)


def test_game_split_requires_two_actions(rng):
    g = rand_game(rng, 1, 1, F(1, 2))
    with pytest.raises(PreconditionError):
        games.game_split_step(g, 0)


def test_game_to_binary_identity(game1):
    out, recs = games.game_to_binary(game1)
    assert out is game1
    assert recs == []


def test_game_to_binary_three_actions():
    p = core.BlockMatrix([[["1"], ["1"], ["1"]]])
    g = games.StochasticGame(p, ["1", "3", "2"], "1/2", ("max",))
    out, recs = games.game_to_binary(g)
    assert len(recs) == 1
    assert all(a <= 2 for a in out.a)
    _, v = games.strategy_iteration(out)
    assert games.recover_game_values(recs, v) == (F(6),)


def test_game_to_binary_random(rng):
    for _ in range(10):
        g = rand_game(rng, rng.randint(1, 3), 3, F(rng.randint(1, 9), 10))
        out, recs = games.game_to_binary(g)
        assert all(a <= 2 for a in out.a)
        # owners preserved, new states inherit the split state's owner
        assert out.owner[: g.n] == g.owner
        _, v = games.strategy_iteration(out)
        recovered = games.recover_game_values(recs, v)
        assert games.check_optimality(g, recovered)
        _, v_star = games.strategy_iteration(g)
        assert recovered == v_star
