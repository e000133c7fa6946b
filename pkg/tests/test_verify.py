import json
import math

import numpy as np
import pytest

from radialbodies.ballbody import StarGauge, ball_gauge, euclidean_gauge
from radialbodies.geometry import DirectionGrid, box, interval, polytope
from radialbodies.logconcave import CovariogramFn, Gaussian, Indicator, RayProfile
from radialbodies.verify import (check_boundary_infinity, check_det_inequality,
                                 check_directional_convexity, check_H_inequality,
                                 check_ip_properties, check_limits, check_mollify_convergence,
                                 check_monotonicity, check_prekopa_marginal, check_subadditivity,
                                 quadratic_exponential_2d, random_quadratic_exponential, run_suite,
                                 smoothed_box)


def gauge_of(g, p):
    return StarGauge(g.dimension, lambda X: ball_gauge(g, p, X))


def test_subadditivity_examples(square, triangle):
    r = check_subadditivity(gauge_of(CovariogramFn(square), 1), 10_000, seed=0)
    assert r.passed and r.worst_violation <= 1e-6
    assert check_subadditivity(gauge_of(CovariogramFn(triangle), -0.5), 10_000, seed=0).passed
    r = check_subadditivity(euclidean_gauge(2), 1000, seed=0)
    assert r.passed and r.worst_violation == 0


def test_subadditivity_detects_nonconvex_gauge():
    # the l_{1/2} quasi-norm is not subadditive
    G = StarGauge(2, lambda X: (np.sqrt(np.abs(X)).sum(1)) ** 2)
    r = check_subadditivity(G, 1000, seed=0)
    assert not r.passed and r.witnesses


def test_subadditivity_rejects_infinite_gauge():
    g = Indicator(box([0, 0], [1, 1]))
    with pytest.raises(ValueError, match="direction"):
        check_subadditivity(gauge_of(g, 1), 100, seed=0)


def test_directional_convexity_examples(square):
    r = check_directional_convexity(euclidean_gauge(2), [1, 0], [0, 1], 1e-3)
    assert r.details["second_differences"][0] == pytest.approx(1, abs=1e-5)
    G = gauge_of(CovariogramFn(square), 1)
    r = check_directional_convexity(G, [1, 0.2], [1, 0.2], 1e-3)
    assert abs(r.details["second_differences"][0]) < 1e-3
    rng = np.random.default_rng(0)
    r = check_directional_convexity(gauge_of(Gaussian(np.eye(2)), -0.5), rng.standard_normal((8, 2)),
                                    rng.standard_normal((8, 2)))
    assert r.passed


def test_H_inequality_examples(square):
    g = Gaussian(np.eye(2))
    r = check_H_inequality(g, 2, np.array([1.0, 0]), np.array([0, 1.0]))
    assert r.passed and r.details["lhs"] == pytest.approx(-4, rel=1e-6) and r.details["rhs"] == pytest.approx(0, abs=1e-6)
    u = np.array([0.6, 0.8])
    r = check_H_inequality(g, 2, u, u)
    # both sides p^2 (p+1) / |u|^2 = 12
    assert r.details["collinear"] and r.details["equality_within_budget"]
    assert r.details["lhs"] == pytest.approx(12, rel=1e-6)
    rng = np.random.default_rng(4)
    gs = CovariogramFn(square)
    for _ in range(3):
        assert check_H_inequality(gs, -0.5, rng.uniform(-0.3, 0.3, 2), rng.standard_normal(2)).passed


def test_H_inequality_rejects_p_zero():
    with pytest.raises(ValueError):
        check_H_inequality(Gaussian(np.eye(2)), 0, np.array([1.0, 0]), np.array([0, 1.0]))


def test_det_inequality_gaussian_moments():
    r = check_det_inequality(quadratic_exponential_2d(1, 1), 1)
    d = r.details
    assert d["A"] == pytest.approx(math.sqrt(math.pi), rel=1e-10)
    assert d["C"] == pytest.approx(-math.sqrt(math.pi) / 2, rel=1e-10)
    assert d["B"] == pytest.approx(0, abs=1e-12)
    assert d["det"] == pytest.approx(-math.pi / 2, rel=1e-10)
    assert r.passed


@pytest.mark.parametrize("p", [-0.5, 0.5, 2])
def test_det_inequality_cross_term(p):
    r = check_det_inequality(quadratic_exponential_2d(1, 1, 1), p)
    assert r.passed and r.details["det"] < 0
    oracle = r.details["oracle"]
    assert oracle["A"] == pytest.approx(r.details["A"], rel=1e-4)


def test_det_inequality_separable_signs():
    r = check_det_inequality(smoothed_box(), 1)
    assert r.passed
    assert abs(r.details["B"]) < 1e-9 and r.details["A"] > 0 and r.details["C"] < 0


def test_det_inequality_random_instances():
    rng = np.random.default_rng(0)
    for _ in range(5):
        f = random_quadratic_exponential(rng)
        for p in (-0.5, 1):
            assert check_det_inequality(f, p).passed


def test_prekopa_marginal():
    r = check_prekopa_marginal(quadratic_exponential_2d(1, 1), [0, 0.5, 1], p=1)
    assert r.passed
    assert check_prekopa_marginal(smoothed_box(), [0, 0.5, 1]).passed
    scaled = check_prekopa_marginal(quadratic_exponential_2d(1, 1, weight=5.0), [0, 0.5, 1], p=1)
    np.testing.assert_allclose(scaled.details["margins"], r.details["margins"], atol=1e-12)


def test_monotonicity_examples(segment):
    grid1 = DirectionGrid.make(1, 2)
    r = check_monotonicity(CovariogramFn(segment), [-0.9, -0.5, 0, 1, 5], grid1)
    assert r.passed
    radii = 1 / np.array([ball_gauge(CovariogramFn(segment), p, np.array([1.0])) for p in [-0.9, -0.5, 0, 1, 5]])
    np.testing.assert_allclose(radii, [0.0774, 0.25, 0.3679, 0.5, 0.6988], atol=1e-4)
    ind = Indicator(box([-1, -1], [1, 1]))
    r = check_monotonicity(ind, [-0.5, 1, 3], DirectionGrid.make(2, 16))
    assert r.passed and r.worst_violation < 1e-12
    r = check_monotonicity(Gaussian(np.eye(2)), [1, 2], DirectionGrid.make(2, 8))
    assert r.passed


def test_limits_check_reports_known_gaps(segment, square, triangle):
    r = check_limits(segment, DirectionGrid.make(1, 2))
    # R_200 of a segment has radial 201^{-1/200}, 2.6% inside DK
    assert r.details["difference_body_deviation"] == pytest.approx(1 - 201 ** (-1 / 200), rel=1e-8)
    assert r.details["polar_projection_deviation"] < 1e-9
    assert not r.passed
    r = check_limits(triangle, DirectionGrid.make(2, 16))
    assert r.details["polar_projection_deviation"] == pytest.approx(0.5, abs=0.01)
    assert r.details["volume_scaled_polar_projection_deviation"] < 0.01


def test_ip_properties():
    ind = RayProfile.from_callable(lambda r: (r <= 0.7) * 1.0, 0.7)
    r = check_ip_properties(ind, [-0.9, -0.5, 0, 1, 2, 5])
    assert r.passed and r.details["indicator"]
    exp = RayProfile.from_callable(lambda r: np.exp(-r))
    r = check_ip_properties(exp, [-0.5, 1, 2, 5])
    assert r.passed and r.details["values"][1] == pytest.approx(1) and r.details["values"][2] == pytest.approx(math.sqrt(2))
    tent = RayProfile.from_callable(lambda r: np.maximum(1 - r, 0), 1.0)
    r = check_ip_properties(tent, [-0.5, 1, 2])
    # monotone, but I_200 = 201^{-1/200} is 2.6% short of the support end
    assert r.details["limit_deviation"] == pytest.approx(1 - 201 ** (-1 / 200), rel=1e-8)
    assert not r.passed


def test_mollify_convergence():
    g = Gaussian(np.eye(2))
    probes = np.array([[1.0, 0], [0.6, 0.8]])
    r = check_mollify_convergence(g, 1, [4, 16, 64, 256], probes)
    assert r.passed and r.details["strict_decrease"]
    assert r.details["closed_form_deviation"] < 1e-4
    r = check_mollify_convergence(Indicator(interval(-1, 1)), -0.5, [4, 16, 64, 256], [[1.0], [-1.0]])
    assert r.passed


def test_boundary_infinity():
    g = Indicator(box([0, 0], [1, 1]))
    r = check_boundary_infinity(g, [[-1, 0], [1, 0], [0, 1]], [-0.5, 1])
    assert r.passed
    G = r.details["gauges"]
    assert np.all(np.isinf(G[:, 0])) and np.all(np.isfinite(G[:, 1:]))


def test_report_serialisation_and_reproducibility(square):
    G = gauge_of(CovariogramFn(square), -0.5)
    a = check_subadditivity(G, 500, seed=3).to_dict()
    b = check_subadditivity(G, 500, seed=3).to_dict()
    assert json.dumps(a) == json.dumps(b)
    assert set(a) >= {"check", "instance", "pass", "worst_violation", "tolerance", "witnesses", "seed"}


def test_run_suite_orders_by_check_and_derives_seeds():
    suite = {"checks": [
        {"check": "subadditivity", "instance": {"gauge": "euclidean", "dimension": 2, "pairs": 100}},
        {"check": "ip_properties", "instance": {"profile": {"kind": "exponential"}, "p_list": [1, 2]}},
    ]}
    reports = run_suite(suite, seed=7)
    assert [r.check for r in reports] == ["ip_properties", "subadditivity"]
    assert run_suite(suite, seed=7)[1].seed == reports[1].seed != run_suite(suite, seed=8)[1].seed
