import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.errors import DomainError, InfeasiblePoint
from core.kkt import (
    Found, MultiplierPair, NoneExist, complete_multipliers, convert_multipliers, find_multipliers, sample_multipliers,
    scalarized_gradients,
)
from core.model import ratio_gradient
from tests.factories import one_dim, random_instance, random_point


def _cosine(a, b) -> float:
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))


def test_origin_admits_multipliers(example_instance):
    res = find_multipliers(example_instance, [0.0])
    assert isinstance(res, Found)
    pair = res.pair
    assert np.all(pair.tau > 0)
    assert pair.stationarity_residual <= 1e-8
    np.testing.assert_allclose(pair.lam, [0.0, 0.0], atol=1e-12)
    assert pair.tau @ [0.5, -1.0, 3.0] == pytest.approx(0.0, abs=1e-10)


def test_reference_direction_at_origin(example_instance):
    ref = np.array([0.5, 1.0, 0.25])
    res = find_multipliers(example_instance, [0.0], reference=ref)
    assert _cosine(res.pair.tau, ref) >= 0.999


def test_reference_direction_near_minus_quarter(example_instance):
    ref = np.array([0.62, 1.0, 0.89])
    res = find_multipliers(example_instance, [-0.25], reference=ref)
    assert isinstance(res, Found)
    assert _cosine(res.pair.tau, ref) >= 0.999
    assert res.pair.stationarity_residual <= 1e-8


def test_max_min_tau_near_minus_quarter(example_instance):
    tau = find_multipliers(example_instance, [-0.25]).pair.tau
    np.testing.assert_allclose(tau / tau[0], [1.0, 1.15442, 1.0], atol=1e-4)


def test_point_one_is_not_kkt(example_instance):
    res = find_multipliers(example_instance, [1.0])
    assert isinstance(res, NoneExist)
    assert not res.found


def test_infeasible_point(example_instance):
    with pytest.raises(InfeasiblePoint):
        find_multipliers(example_instance, [2.5])


def test_active_lower_bound_carries_the_multiplier():
    p = one_dim(([[0.0]], [1.0], 0.0), ([[0.0]], [0.0], 1.0), 0.0, 1.0)
    pair = find_multipliers(p, [0.0]).pair
    assert pair.tau[0] == pytest.approx(0.5)
    np.testing.assert_allclose(pair.lam, [0.0, 0.5], atol=1e-12)
    assert pair.complementarity_residual == 0.0


def test_inactive_bounds_cannot_carry_multipliers(example_instance):
    quoted = MultiplierPair.at(example_instance, [0.0], [0.5, 1.0, 0.25], [1.0, 1.0])
    assert quoted.complementarity_residual == pytest.approx(4.0)


def test_complete_multipliers(example_instance):
    res = complete_multipliers(example_instance, [0.0], [0.5, 1.0, 0.25])
    assert isinstance(res, Found)
    np.testing.assert_allclose(res.pair.lam, [0.0, 0.0], atol=1e-12)
    assert isinstance(complete_multipliers(example_instance, [0.0], [1.0, 1.0, 1.0]), NoneExist)
    with pytest.raises(DomainError):
        complete_multipliers(example_instance, [0.0], [1.0, 0.0, 1.0])
    with pytest.raises(InfeasiblePoint):
        complete_multipliers(example_instance, [3.0], [1.0, 1.0, 1.0])


def test_sampled_vertices_are_valid(example_instance, rng):
    taus = sample_multipliers(example_instance, [0.0], rng, 16)
    assert taus
    G = ratio_gradient(example_instance, [0.0])
    for tau in taus:
        assert np.all(tau >= 1e-9 - 1e-15)
        assert np.max(np.abs(tau @ G)) <= 1e-9


def test_convert_multipliers(example_instance):
    np.testing.assert_allclose(convert_multipliers(example_instance, [0.0], [0.5, 1.0, 0.25]), [0.25, 1.0, 0.25])
    with pytest.raises(DomainError):
        convert_multipliers(example_instance, [0.0], [0.0, 1.0, 1.0])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4), m=st.integers(1, 4))
def test_ratio_and_scalarized_stationarity_agree(seed, n, m):
    # sum tau_i grad r_i = sum (tau_i / g_i) (grad f_i - r_i grad g_i)
    rng = np.random.default_rng(seed)
    p = random_instance(rng, n, m)
    x = random_point(rng, n)
    tau = rng.uniform(0.1, 2.0, m)
    lhs = tau @ ratio_gradient(p, x)
    rhs = convert_multipliers(p, x, tau) @ scalarized_gradients(p, x)
    np.testing.assert_allclose(lhs, rhs, atol=1e-10 * (1.0 + np.max(np.abs(lhs))))


@pytest.mark.parametrize("x", [0.0, -0.25])
def test_normalization_scales_the_multipliers(example_instance, x):
    unit = find_multipliers(example_instance, [x]).pair
    ten = find_multipliers(example_instance, [x], normalization=10.0).pair
    np.testing.assert_allclose(ten.tau, 10.0 * unit.tau, rtol=1e-7)
    np.testing.assert_allclose(ten.lam, 10.0 * unit.lam, atol=1e-9)
    assert ten.floor == pytest.approx(10.0 * unit.floor, rel=1e-7)


def test_normalization_scales_the_bound_multiplier():
    p = one_dim(([[0.0]], [1.0], 0.0), ([[0.0]], [0.0], 1.0), 0.0, 1.0)
    pair = find_multipliers(p, [0.0], normalization=10.0).pair
    assert pair.tau[0] == pytest.approx(5.0)
    np.testing.assert_allclose(pair.lam, [0.0, 5.0], atol=1e-9)
