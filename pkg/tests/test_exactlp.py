from fractions import Fraction as F

from gridcube import exactlp, linalg


def test_bounded_max():
    lp = exactlp.LinearProgram(direction="max")
    lp.add_var(1)
    lp.add_row([1], "<=", 1)
    out = exactlp.solve(lp)
    assert out.status == "optimal"
    assert out.value == 1
    assert out.x == [F(1)]


def test_unbounded():
    lp = exactlp.LinearProgram(direction="max")
    lp.add_var(1)
    out = exactlp.solve(lp)
    assert out.status == "unbounded"
    assert out.certificate is not None


def test_infeasible():
    lp = exactlp.LinearProgram()
    lp.add_var(0)
    lp.add_row([1], "<=", -1)
    out = exactlp.solve(lp)
    assert out.status == "infeasible"
    assert out.certificate is not None


def test_equality_and_free_vars():
    # min x + y s.t. x - y == 3, x + y >= 1, y free
    lp = exactlp.LinearProgram(direction="min")
    lp.add_var(1, nonneg=True)
    lp.add_var(1, nonneg=False)
    lp.add_row([1, -1], "==", 3)
    lp.add_row([1, 1], ">=", 1)
    out = exactlp.solve(lp)
    assert out.status == "optimal"
    x, y = out.x
    assert x - y == 3 and x + y >= 1
    assert out.value == 1  # x = 2, y = -1


def test_exact_fractions():
    # max 2x + 3y s.t. 3x + y <= 7/2, x + 2y <= 9/4
    lp = exactlp.LinearProgram(direction="max")
    lp.add_var(2)
    lp.add_var(3)
    lp.add_row([3, 1], "<=", F(7, 2))
    lp.add_row([1, 2], "<=", F(9, 4))
    out = exactlp.solve(lp)
    assert out.status == "optimal"
    x, y = out.x
    assert 3 * x + y <= F(7, 2) and x + 2 * y <= F(9, 4)
    assert out.value == 2 * x + 3 * y
    assert out.value == F(77, 20)


def test_degenerate_lp_terminates():
    # Klee-Minty-ish degeneracy: Bland must not cycle
    lp = exactlp.LinearProgram(direction="max")
    for c in (3, 2):
        lp.add_var(c)
    lp.add_row([1, 0], "<=", 0)
    lp.add_row([1, 1], "<=", 0)
    lp.add_row([2, 1], "<=", 0)
    out = exactlp.solve(lp)
    assert out.status == "optimal"
    assert out.value == 0


def test_unbounded_ray_improves():
    # max x - y s.t. x - y <= 5 is bounded; drop the bound on x + make it open
    lp = exactlp.LinearProgram(direction="max")
    lp.add_var(1)
    lp.add_var(-1)
    lp.add_row([-1, 1], "<=", 2)
    out = exactlp.solve(lp)
    assert out.status == "unbounded"
    ray = out.certificate
    # ray keeps feasibility and improves the objective
    assert ray[0] >= 0 and ray[1] >= 0
    assert -ray[0] + ray[1] <= 0
    assert ray[0] - ray[1] > 0


def test_strict_feasibility(k1):
    x = exactlp.strict_feasibility(k1.flat_rows())
    assert x is not None and all(v > 0 for v in x)
    assert exactlp.strict_feasibility([[-1]]) is None
    x2 = exactlp.strict_feasibility(linalg.identity(3))
    assert x2 is not None and all(v > 0 for v in x2)


def test_strict_feasibility_needs_both_sides():
    # Ax > 0 is feasible for some x but not with x > 0
    assert exactlp.strict_feasibility([[-1, 1], [1, -2]]) is None
