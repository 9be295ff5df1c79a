import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.errors import ConfigError, InfeasiblePoint
from core.model import AffineConstraint, BoxConstraint, evaluate_ratios
from core.oracle import (
    approximate_pareto_front, dominance_check, dominance_masks, grid_array, grid_points, lipschitz_margin,
    ratio_matrix,
)
from tests.factories import random_instance, trivial_instance


def test_grid_counts(example_instance):
    np.testing.assert_allclose(grid_array(example_instance, 1.0)[:, 0], [-2.0, -1.0, 0.0, 1.0, 2.0])
    assert len(grid_array(example_instance, 1e-3)) == 4001


def test_grid_respects_constraints_in_row_major_order():
    p = trivial_instance(2, [BoxConstraint([0.0, 0.0], [1.0, 1.0]), AffineConstraint([1.0, 1.0], -1.0)])
    pts = [tuple(x) for x in grid_points(p, 0.5)]
    assert pts == [(0.0, 0.0), (0.0, 0.5), (0.0, 1.0), (0.5, 0.0), (0.5, 0.5), (1.0, 0.0)]


def test_grid_errors(example_instance):
    with pytest.raises(ConfigError):
        grid_array(example_instance, 0.0)
    with pytest.raises(ConfigError):
        grid_array(example_instance, 1e-3, grid_cap=100)
    with pytest.raises(ConfigError):
        grid_array(trivial_instance(1), 0.1)
    assert len(grid_array(trivial_instance(1), 0.5, bounds=([0.0], [1.0]))) == 3


def test_dominance_masks():
    Y = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 2.0]])
    dom, weak = dominance_masks(Y, np.array([1.0, 1.0]), 1e-9)
    assert dom.tolist() == [True, True, False, False]
    assert weak.tolist() == [True, False, False, False]


def test_margin_only_tightens_the_strict_side():
    Y = np.array([[1.0005, 0.5], [1.0, 0.95], [1.0, 0.8], [0.8, 0.8]])
    q = np.array([1.0, 1.0])
    dom, weak = dominance_masks(Y, q, 1e-9, margin=0.1)
    assert dom.tolist() == [False, False, True, True]
    assert weak.tolist() == [False, False, False, True]
    assert dominance_masks(Y, q, 1e-9)[0].tolist() == [False, True, True, True]


def test_vectorized_ratios_match_pointwise(example_instance):
    X = grid_array(example_instance, 0.25)
    R = ratio_matrix(example_instance, X)
    for x, r in zip(X, R):
        np.testing.assert_allclose(r, evaluate_ratios(example_instance, x), rtol=1e-14, atol=1e-14)


@pytest.mark.parametrize("x", [0.0, -0.25])
def test_certified_points_are_undominated(example_instance, x):
    rep = dominance_check(example_instance, [x], 1e-3)
    assert not rep.dominated
    assert rep.dominator is None
    assert rep.points_checked == 4001


def test_two_is_dominated(example_instance):
    rep = dominance_check(example_instance, [2.0], 0.01)
    assert rep.dominated
    dom = evaluate_ratios(example_instance, rep.dominator)
    q = evaluate_ratios(example_instance, [2.0])
    assert np.all(dom <= q + 1e-9) and np.any(dom < q - 1e-9)
    # smallest dominating grid point
    X = grid_array(example_instance, 0.01)
    mask, _ = dominance_masks(ratio_matrix(example_instance, X), q, 1e-9)
    assert rep.dominator[0] == X[mask][0][0]


def test_threads_do_not_change_the_answer(example_instance):
    one = dominance_check(example_instance, [1.5], 5e-5, threads=1)
    four = dominance_check(example_instance, [1.5], 5e-5, threads=4)
    assert one.to_dict() == four.to_dict()


def test_query_must_be_feasible(example_instance):
    with pytest.raises(InfeasiblePoint):
        dominance_check(example_instance, [2.5], 0.1)


def test_front_of_the_example(example_instance):
    front = approximate_pareto_front(example_instance, 0.01)
    xs = np.array([f.point[0] for f in front])
    assert np.any(np.abs(xs) < 1e-9)
    assert np.any(np.abs(xs + 0.25) < 1e-9)
    assert xs.min() >= -0.5 - 0.011
    assert xs.max() <= 0.1623 + 0.011
    weak = approximate_pareto_front(example_instance, 0.01, weak=True)
    assert {tuple(f.point) for f in front} <= {tuple(f.point) for f in weak}


def test_lipschitz_margin_grows_with_the_step(example_instance):
    assert lipschitz_margin(example_instance, 0.1) > lipschitz_margin(example_instance, 0.01) > 1e-9


def test_margin_clears_a_close_call(example_instance):
    margin = lipschitz_margin(example_instance, 0.01)
    assert dominance_check(example_instance, [2.0], 0.01, margin=margin).dominated
    assert not dominance_check(example_instance, [0.1], 0.01, margin=margin).dominated


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(1, 3))
def test_front_points_pass_the_dominance_check(seed, m):
    p = random_instance(np.random.default_rng(seed), 2, m)
    for fp in approximate_pareto_front(p, 0.1):
        assert not dominance_check(p, fp.point, 0.1).dominated


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(2, 3))
def test_refining_the_grid_keeps_dominated_points_dominated(seed, m):
    p = random_instance(np.random.default_rng(seed), 2, m)
    coarse = {tuple(fp.point) for fp in approximate_pareto_front(p, 0.25)}
    fine = {tuple(fp.point) for fp in approximate_pareto_front(p, 0.125)}
    for x in grid_array(p, 0.25):
        if tuple(x) not in coarse:
            assert tuple(x) not in fine
            assert dominance_check(p, x, 0.125).dominated
