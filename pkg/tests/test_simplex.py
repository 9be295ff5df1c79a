import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from core.errors import DimensionError
from core.simplex import LpInfeasible, LpOptimal, LpUnbounded, solve_linear_program


def test_textbook_maximization():
    res = solve_linear_program([1.0, 1.0], A_ineq=[[1.0, 2.0], [3.0, 1.0]], b_ineq=[4.0, 6.0])
    assert isinstance(res, LpOptimal)
    np.testing.assert_allclose(res.x, [1.6, 1.2], atol=1e-12)
    assert res.objective == pytest.approx(2.8)


def test_equality_rows_go_through_phase_one():
    res = solve_linear_program([-1.0, -2.0], A_eq=[[1.0, 1.0]], b_eq=[1.0])
    assert isinstance(res, LpOptimal)
    np.testing.assert_allclose(res.x, [1.0, 0.0], atol=1e-12)


def test_negative_right_hand_side():
    # x >= 2 written as -x <= -2
    res = solve_linear_program([-1.0], A_ineq=[[-1.0]], b_ineq=[-2.0])
    assert isinstance(res, LpOptimal)
    assert res.x[0] == pytest.approx(2.0)


def test_infeasible():
    assert isinstance(solve_linear_program([1.0], A_ineq=[[1.0]], b_ineq=[-1.0]), LpInfeasible)
    assert isinstance(solve_linear_program([1.0, 0.0], A_eq=[[1.0, 1.0], [1.0, 1.0]], b_eq=[1.0, 2.0]),
                      LpInfeasible)


def test_unbounded():
    res = solve_linear_program([1.0, 0.0], A_ineq=[[1.0, -1.0]], b_ineq=[1.0])
    assert isinstance(res, LpUnbounded)


def test_redundant_equalities():
    res = solve_linear_program([1.0, 1.0], A_eq=[[1.0, 1.0], [2.0, 2.0]], b_eq=[1.0, 2.0])
    assert isinstance(res, LpOptimal)
    assert res.objective == pytest.approx(1.0)


def test_degenerate_cycling_example_terminates():
    c = [0.75, -150.0, 0.02, -6.0]
    A = [[0.25, -60.0, -0.04, 9.0],
         [0.5, -90.0, -0.02, 3.0],
         [0.0, 0.0, 1.0, 0.0]]
    res = solve_linear_program(c, A_ineq=A, b_ineq=[0.0, 0.0, 1.0])
    assert isinstance(res, LpOptimal)
    assert res.objective == pytest.approx(0.05)


def test_shape_mismatch():
    with pytest.raises(DimensionError):
        solve_linear_program([1.0, 1.0], A_ineq=[[1.0, 1.0, 1.0]], b_ineq=[1.0])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), rows=st.integers(1, 5), cols=st.integers(1, 6))
def test_agrees_with_scipy_on_bounded_problems(seed, rows, cols):
    rng = np.random.default_rng(seed)
    A = rng.uniform(0.1, 2.0, (rows, cols))
    b = rng.uniform(0.5, 3.0, rows)
    c = rng.standard_normal(cols)
    res = solve_linear_program(c, A_ineq=A, b_ineq=b)
    ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(0, None)] * cols, method="highs")
    assert isinstance(res, LpOptimal)
    assert res.objective == pytest.approx(-ref.fun, abs=1e-8)
    assert np.all(A @ res.x <= b + 1e-9)
    assert np.all(res.x >= -1e-12)
