import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from core.certify import (
    GGCQ_NOTE, FailsAt, Holds, Route, Status, certify_point, check_eigen_inequality, check_H_nonneg,
    eigen_terms, f_hat, minimize_z, z_value, z_value_sum,
)
from core.errors import InapplicableRoute, InfeasiblePoint
from core.globalmin import GlobalMin
from core.kkt import find_multipliers
from core.model import BoxConstraint, ProblemInstance
from core.spectral import build_H_data, objective_eigen
from tests.factories import one_dim, random_instance, random_point, ratio

seeds = st.integers(min_value=0, max_value=2**32 - 1)
TAU = np.array([0.5, 1.0, 0.25])

@pytest.fixture(scope="module")
def concave_on_unit_interval():
    # max of x^2 on [0, 1] sits at 1, yet no sufficient condition sees it
    return one_dim(([[-1.0]], [0.0], 0.0), ([[0.0]], [0.0], 1.0), 0.0, 1.0)

@pytest.fixture(scope="module")
def opposed_pair():
    # -x^2 and 2x^2 on [-1, 1]: 0 is Pareto, F_1 < 0 but the weighted sum is positive
    return ProblemInstance(1, (ratio([[-1.0]], [0.0], 0.0, [[0.0]], [0.0], 1.0),
                               ratio([[2.0]], [0.0], 0.0, [[0.0]], [0.0], 1.0)),
                           (BoxConstraint([-1.0], [1.0]),))

def test_example_Z_values(example_instance):
    np.testing.assert_allclose(f_hat(example_instance, TAU, [0.0]), [[4.0]])
    assert z_value(example_instance, TAU, [0.0], [1.0]) == pytest.approx(4.0)
    assert z_value(example_instance, TAU, [0.0], [-2.0]) == pytest.approx(16.0)

@settings(max_examples=30, deadline=None)
@given(seed=seeds, n=st.integers(1, 4), m=st.integers(1, 3))
def test_Z_forms_agree(seed, n, m):
    rng = np.random.default_rng(seed)
    p = random_instance(rng, n, m)
    xstar, x = random_point(rng, n), random_point(rng, n)
    tau = rng.uniform(0.1, 2.0, m)
    z = z_value(p, tau, xstar, x)
    scale = 1.0 + abs(z)
    assert z_value_sum(p, tau, xstar, x) == pytest.approx(z, abs=1e-9 * scale)
    assert float(eigen_terms(p, tau, xstar, x).sum()) == pytest.approx(z, abs=1e-9 * scale)

def test_minimize_z_short_circuits_on_psd(example_instance, run_config):
    res = minimize_z(example_instance, TAU, [0.0], run_config)
    assert isinstance(res, GlobalMin)
    assert res.value == 0.0

def test_origin_is_certified_pointwise(example_instance, run_config):
    cert = certify_point(example_instance, [0.0], run_config)
    assert cert.status is Status.CERTIFIED
    assert cert.route is Route.POINTWISE_PSD
    assert cert.multipliers.stationarity_residual <= 1e-8
    out = cert.to_dict()
    assert out["status"] == "CertifiedPareto"
    assert out["route"] == "PointwisePsd"
    assert out["routes_tried"][0]["passed"]

def test_minus_quarter_is_certified(example_instance, run_config):
    cert = certify_point(example_instance, [-0.25], run_config, tau_hint=[0.62, 1.0, 0.89])
    assert cert.status is Status.CERTIFIED
    assert cert.route is Route.POINTWISE_PSD

def test_point_one_is_not_kkt(example_instance, run_config):
    cert = certify_point(example_instance, [1.0], run_config)
    assert cert.status is Status.NOT_KKT
    assert cert.note == GGCQ_NOTE
    assert cert.multipliers is None

def test_infeasible_point_raises(example_instance, run_config):
    with pytest.raises(InfeasiblePoint):
        certify_point(example_instance, [5.0], run_config)

@pytest.mark.parametrize("route, expected", [
    ("psd", Route.POINTWISE_PSD),
    ("eigen", Route.EIGEN_INEQUALITY),
    ("zmin", Route.Z_MINIMIZATION),
])
def test_single_routes_at_the_origin(example_instance, run_config, route, expected):
    cert = certify_point(example_instance, [0.0], run_config.with_overrides(route=route))
    assert cert.status is Status.CERTIFIED
    assert cert.route is expected
    assert len(cert.reports) == 1

def test_H_routes_are_inapplicable_with_a_negative_numerator_eigenvalue(example_instance, run_config):
    for route in ("h", "h_psd"):
        cert = certify_point(example_instance, [0.0], run_config.with_overrides(route=route))
        assert cert.status is Status.INCONCLUSIVE
        assert "not real valued" in cert.reason

def test_a_Pareto_point_can_stay_inconclusive(concave_on_unit_interval, run_config):
    cert = certify_point(concave_on_unit_interval, [1.0], run_config)
    assert cert.status is Status.INCONCLUSIVE
    np.testing.assert_allclose(cert.witness, [0.0], atol=1e-6)
    assert [r.route for r in cert.reports] == [
        Route.POINTWISE_PSD, Route.H_PSD_ALPHA_ZERO, Route.EIGEN_INEQUALITY, Route.Z_MINIMIZATION]
    assert not any(r.passed for r in cert.reports)

def test_eigen_inequality_witness(concave_on_unit_interval, run_config):
    tau = find_multipliers(concave_on_unit_interval, [1.0]).pair.tau
    chk = check_eigen_inequality(concave_on_unit_interval, 0, 0, tau, [1.0], run_config)
    assert isinstance(chk, FailsAt)
    np.testing.assert_allclose(chk.x, [0.0], atol=1e-6)
    assert chk.gap < 0.0

def test_only_Z_minimization_sees_the_weighted_sum(opposed_pair, run_config):
    cert = certify_point(opposed_pair, [0.0], run_config)
    assert cert.status is Status.CERTIFIED
    assert cert.route is Route.Z_MINIMIZATION
    assert [r.passed for r in cert.reports] == [False, False, False, True]
    assert cert.z_min_value == pytest.approx(0.0)

def test_supplied_tau_is_completed(example_instance, run_config):
    cert = certify_point(example_instance, [0.0], run_config, tau=TAU)
    assert cert.status is Status.CERTIFIED
    np.testing.assert_allclose(cert.multipliers.tau, TAU)
    cert = certify_point(example_instance, [0.0], run_config, tau=[1.0, 1.0, 1.0])
    assert cert.status is Status.INCONCLUSIVE

def test_H_check_rejects_complex_data(example_instance, run_config):
    table = objective_eigen(example_instance)
    hd = build_H_data(example_instance, 2, 0, [0.0], *table[2])
    with pytest.raises(InapplicableRoute):
        check_H_nonneg(example_instance, 2, 0, hd, run_config)

def test_H_check_holds_on_a_convex_objective(run_config):
    p = one_dim(([[1.0]], [0.0], 1.0), ([[0.0]], [0.0], 1.0), -1.0, 1.0)
    table = objective_eigen(p)
    hd = build_H_data(p, 0, 0, [0.5], *table[0])
    assert hd.real_valued
    assert isinstance(check_H_nonneg(p, 0, 0, hd, run_config), Holds)

@settings(max_examples=20, deadline=None)
@given(seed=seeds, n=st.integers(1, 3), m=st.integers(1, 3))
def test_H_sign_matches_the_eigen_inequality(seed, n, m):
    rng = np.random.default_rng(seed)
    p = random_instance(rng, n, m, psd_numerators=True)
    xstar = random_point(rng, n)
    tau = rng.uniform(0.1, 2.0, m)
    table = objective_eigen(p)
    data = {(i, k): build_H_data(p, i, k, xstar, *table[i]) for i in range(m) for k in range(n)}
    for _ in range(500):
        x = random_point(rng, n)
        terms = eigen_terms(p, tau, xstar, x, table)
        for (i, k), hd in data.items():
            h = hd.value(x)
            if abs(h) < 1e-9:
                continue
            assert (h >= 0.0) == (terms[i, k] >= 0.0)


def test_h_psd_route_ignores_the_dinkelbach_tolerance(run_config):
    p = one_dim(([[1.0]], [0.0], 0.0), ([[0.0]], [0.0], 1.0), 0.5, 1.0)
    cert = certify_point(p, [0.5], run_config.with_overrides(route="h_psd", alpha_tol=2.0))
    assert cert.status is Status.INCONCLUSIVE
    assert "nonzero" in cert.reason


@pytest.mark.parametrize("x, vanishes", [(2e-9, True), (1e-3, False)])
def test_alpha_vanishes_against_the_kkt_tolerance(x, vanishes):
    p = one_dim(([[1.0]], [0.0], 0.0), ([[0.0]], [0.0], 1.0), -1.0, 1.0)
    eA, eB = objective_eigen(p)[0]
    hd = build_H_data(p, 0, 0, [x], eA, eB)
    assert hd.alpha_vanishes(1e-8) is vanishes
