from fractions import Fraction as F

import pytest

from gridcube import core, linalg
from gridcube.errors import (
    InvalidSelectorError,
    NotStochasticKError,
    PreconditionError,
    TooLargeError,
)
from conftest import rand_k_matrix, rand_p_matrix, rand_pos_fraction


def test_representative_of_identity_pattern():
    e = core.eb((2, 1))
    assert core.representative_submatrix(e, (0, 0)) == linalg.identity(2)
    for sel in core.selectors((3, 2, 2)):
        assert core.representative_submatrix(core.eb((3, 2, 2)), sel) == linalg.identity(3)


def test_representative_extraction(k1):
    assert core.representative_submatrix(k1, (0, 0)) == linalg.mat([[1, F(-1, 2)], [F(-1, 2), 1]])
    assert core.representative_submatrix(k1, (1, 0)) == linalg.mat([[1, 0], [F(-1, 2), 1]])


def test_representative_invalid_selector(k1):
    with pytest.raises(InvalidSelectorError):
        core.representative_submatrix(k1, (2, 0))
    with pytest.raises(InvalidSelectorError):
        core.representative_submatrix(k1, (0,))


def test_is_p_matrix(k1):
    assert core.is_p_matrix(core.eb((3, 2)))
    assert not core.is_p_matrix(core.from_square([[0]]))
    assert core.is_p_matrix(k1)
    assert not core.is_p_matrix(core.from_square([[1, -2], [-2, 1]]))


def test_is_p_cap():
    with pytest.raises(TooLargeError):
        core.is_p_matrix(core.eb((2, 2)), cap=3)


def test_is_z_matrix(k1, h1):
    assert core.is_z_matrix(k1)
    assert not core.is_z_matrix(h1)
    assert core.is_z_matrix(core.eb((2, 2)))
    assert core.z_violation(h1) == (0, 0, 1)


def test_is_k_matrix(k1):
    assert core.is_k_matrix(k1)
    x = core.k_certificate(k1)
    assert all(v > 0 for v in x)
    mx = [sum(a * b for a, b in zip(row, x)) for _, _, row in k1.rows()]
    assert all(v > 0 for v in mx)
    assert not core.is_k_matrix(core.from_square([[1, -2], [-2, 1]]))
    assert core.is_k_matrix(core.eb((2, 1)))


def test_k_equals_p_and_z_on_random(rng):
    for _ in range(25):
        b = tuple(rng.randint(1, 2) for _ in range(rng.randint(1, 3)))
        m = rand_p_matrix(rng, b) if rng.random() < 0.5 else rand_k_matrix(rng, b)
        assert core.is_k_matrix(m) == (core.is_p_matrix(m) and core.is_z_matrix(m))
    # a non-P Z-matrix for the negative side
    m = core.from_square([[1, -2], [-2, 1]])
    assert core.is_z_matrix(m) and not core.is_k_matrix(m)


def test_as_stochastic_k_identity_pattern():
    form = core.as_stochastic_k(core.eb((2, 1)))
    assert form.gamma == 0
    assert form.p == core.uniform_rowstochastic((2, 1))


def test_as_stochastic_k_derived():
    m = core.BlockMatrix([[["1", "-1/2"], ["1/2", "0"]], [["-1/2", "1"]]])
    form = core.as_stochastic_k(m)
    assert form.gamma == F(1, 2)
    assert form.p == core.BlockMatrix([[[0, 1], [1, 0]], [[1, 0]]])
    assert form.matrix() == m


def test_as_stochastic_k_rejects(k1):
    with pytest.raises(NotStochasticKError) as exc:
        core.as_stochastic_k(k1)
    assert exc.value.row is not None


def test_stochastic_form_k1(k1):
    sc, form = core.stochastic_form(k1, [1, 1])
    assert form.gamma == F(1, 2)
    scaled = core.scale(k1, sc)
    assert scaled == core.BlockMatrix([[["1", "-1/2"], ["1/2", "0"]], [["-1/2", "1"]]])
    # left factors proportional to (2, 1, 2)
    ratio = sc.left[0] / 2
    assert sc.left == (2 * ratio, 1 * ratio, 2 * ratio)


def test_stochastic_form_identity():
    sc, form = core.stochastic_form(core.eb((2, 1)), [1, 1])
    assert form.gamma == 0


def test_stochastic_form_of_scaled_variant(k1):
    sc = core.DiagonalScaling((F(3), F(1, 2), F(2)), (F(1, 3), F(5)))
    scaled = core.scale(k1, sc)
    x = core.k_certificate(scaled)
    _, form = core.stochastic_form(scaled, x)
    assert 0 <= form.gamma < 1
    # output reproduces E(b) - gamma P with P rowstochastic
    p = form.p
    assert all(sum(row) == 1 and all(v >= 0 for v in row) for _, _, row in p.rows())


def test_stochastic_form_bad_certificate(k1):
    with pytest.raises(PreconditionError):
        core.stochastic_form(k1, [1, -1])
    with pytest.raises(PreconditionError):
        core.stochastic_form(core.from_square([[1, -2], [-2, 1]]), [1, 1])


def test_scale_examples():
    e = core.eb((2, 1))
    sc = core.DiagonalScaling((2, 2, 2), (1, 1))
    doubled = core.scale(e, sc)
    assert doubled == core.BlockMatrix([[[2, 0], [2, 0]], [[0, 2]]])
    with pytest.raises(PreconditionError):
        core.DiagonalScaling((1, 0, 1), (1, 1))


def test_signed_conjugate(k1):
    assert core.signed_conjugate(k1, (1, 1)) == k1
    flipped = core.signed_conjugate(k1, (1, -1))
    assert flipped == core.BlockMatrix([[["1", "1/2"], ["1", "0"]], [["1/2", "1"]]])
    assert core.signed_conjugate(flipped, (1, -1)) == k1


def test_signed_conjugate_preserves_p(rng):
    for _ in range(10):
        b = tuple(rng.randint(1, 2) for _ in range(rng.randint(1, 3)))
        m = rand_p_matrix(rng, b)
        signs = tuple(rng.choice((1, -1)) for _ in b)
        assert core.is_p_matrix(core.signed_conjugate(m, signs)) == core.is_p_matrix(m)


def test_scaling_preserves_p(rng, k1):
    for _ in range(10):
        b = tuple(rng.randint(1, 2) for _ in range(rng.randint(1, 3)))
        m = rand_p_matrix(rng, b)
        sc = core.DiagonalScaling(
            tuple(rand_pos_fraction(rng) for _ in range(m.m)),
            tuple(rand_pos_fraction(rng) for _ in range(m.n)),
        )
        assert core.is_p_matrix(core.scale(m, sc)) == core.is_p_matrix(m)


def test_representative_cap_env(monkeypatch):
    monkeypatch.setenv("GRIDCUBE_CAP", "2")
    with pytest.raises(TooLargeError):
        core.check_representative_cap((2, 2))
    monkeypatch.setenv("GRIDCUBE_CAP", "100")
    assert core.check_representative_cap((2, 2)) == 4
