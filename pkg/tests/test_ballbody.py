import math

import numpy as np
import pytest

from radialbodies.ballbody import (PIndex, QuadratureError, QuadratureSpec, ball_gauge,
                                   ball_gauge_unified, gaussian_radius, i_p, radial_samples)
from radialbodies.geometry import DirectionGrid, box, interval, minkowski_functional
from radialbodies.logconcave import (CovariogramFn, ExpNorm, Gaussian, Indicator,
                                     QuadraticExponential, RayProfile)

SEGMENT_PS = [-0.9, -0.5, -0.1, 0.5, 1, 2, 5]


def segment_radius(p):
    return math.exp(-1) if p == 0 else (1 + p) ** (-1 / p)


def test_pindex_branches():
    assert PIndex.parse(0.0005).branch == "zero"
    assert PIndex.parse(-0.5).branch == "negative"
    assert PIndex.parse("inf").branch == "infinity"
    with pytest.raises(ValueError):
        PIndex.parse(-1)


@pytest.mark.parametrize("p", SEGMENT_PS + [0])
def test_segment_closed_form(p):
    g = CovariogramFn(interval(0, 1))
    assert 1 / ball_gauge(g, p, np.array([1.0])) == pytest.approx(segment_radius(p), rel=1e-10)


def test_segment_examples():
    g = CovariogramFn(interval(0, 1))
    assert ball_gauge(g, -0.5, np.array([1.0])) == pytest.approx(4)
    assert ball_gauge(g, 1, np.array([1.0])) == pytest.approx(2)
    assert 1 / ball_gauge(g, 0, np.array([1.0])) == pytest.approx(0.367879, abs=1e-6)
    assert ball_gauge(g, math.inf, np.array([1.0])) == pytest.approx(1)


@pytest.mark.parametrize("p", [-0.5, 0, 1, 200, math.inf])
def test_indicator_fixed_point(p, heptagon):
    g = Indicator(heptagon)
    D = DirectionGrid.make(2, 32).directions
    np.testing.assert_allclose(ball_gauge(g, p, D), minkowski_functional(heptagon, D), rtol=1e-10)


@pytest.mark.parametrize("p", [-0.5, 1, 2, 0])
def test_gaussian_radii(p):
    g = Gaussian(np.eye(2))
    D = DirectionGrid.make(2, 16).directions
    np.testing.assert_allclose(1 / ball_gauge(g, p, D), gaussian_radius(p), rtol=1e-10)


def test_gaussian_radius_values():
    assert gaussian_radius(2) == pytest.approx(math.sqrt(2))
    assert gaussian_radius(1) == pytest.approx(math.sqrt(math.pi / 2))
    assert ball_gauge(Gaussian(np.eye(3)), 2, np.array([1.0, 0, 0])) == pytest.approx(1 / math.sqrt(2))


def test_square_covariogram_rays():
    g = CovariogramFn(box([0, 0], [1, 1]))
    assert ball_gauge(g, 1, np.array([1.0, 0])) == pytest.approx(2)
    # profile along (1,1) is (1-r)^2 on [0,1]: gauge = (∫(1-r)^2 dr)^{-1} = 3
    assert ball_gauge(g, 1, np.array([1.0, 1.0])) == pytest.approx(3)
    S = radial_samples(g, 1, DirectionGrid.make(2, 8))
    assert S.radii[1] == pytest.approx(math.sqrt(2) / 3)


def test_boundary_origin_gives_infinity():
    g = Indicator(box([0, 0], [1, 1]))
    for p in (-0.5, 0, 1, 5):
        assert ball_gauge(g, p, np.array([-1.0, 0])) == math.inf
        assert ball_gauge(g, p, np.array([1.0, 0])) == pytest.approx(1)


def test_unified_matches_four_branch():
    rng = np.random.default_rng(11)
    fns = [Gaussian(np.array([[1.5, 0.3], [0.3, 0.8]])), CovariogramFn(box([0, 0], [1, 2])),
           QuadraticExponential.from_coefficients(1, 0.5, 0.4), ExpNorm(1.3, 2)]
    worst = 0.0
    for i in range(64):
        g = fns[i % len(fns)]
        p = rng.choice([-0.75, -0.5, -0.25, 0.5, 1.0, 2.0, 4.0])
        x = rng.standard_normal(2)
        a, b = ball_gauge(g, p, x), ball_gauge_unified(g, p, x)
        worst = max(worst, abs(a - b) / a)
    assert worst < 1e-6


def test_zero_branch_methods_agree():
    g = CovariogramFn(box([0, 0], [1, 1]))
    x = np.array([0.6, 0.3])
    a = ball_gauge(g, 0, x)
    assert ball_gauge(g, 0, x, zero_method="richardson") == pytest.approx(a, rel=5e-3)
    assert ball_gauge(g, 0, x, zero_method="log") == pytest.approx(a, rel=1e-6)


def test_homogeneity_and_origin():
    g = CovariogramFn(box([0, 0], [1, 1]))
    x = np.array([0.3, -0.4])
    for p in (-0.5, 0, 2):
        assert ball_gauge(g, p, 2.5 * x) == pytest.approx(2.5 * ball_gauge(g, p, x), rel=1e-12)
        assert ball_gauge(g, p, np.zeros(2)) == 0


@pytest.mark.parametrize("a", [0.7])
def test_i_p_indicator_constant(a):
    psi = RayProfile.from_callable(lambda r: (r <= a) * 1.0, a)
    for p in (-0.9, -0.5, 0.5, 1, 3, 200):
        assert i_p(psi, p) == pytest.approx(a, rel=1e-12)


def test_i_p_exponential_gamma_oracle():
    psi = RayProfile.from_callable(lambda r: np.exp(-r))
    assert i_p(psi, 1) == pytest.approx(1)
    assert i_p(psi, 2) == pytest.approx(math.sqrt(2))
    assert i_p(psi, 5) == pytest.approx(math.gamma(6) ** (1 / 5))
    assert i_p(psi, 200) == pytest.approx(math.exp(math.lgamma(201) / 200), rel=1e-10)


def test_i_p_tent_beta_oracle():
    psi = RayProfile.from_callable(lambda r: np.maximum(1 - r, 0), 1.0)
    for p in (-0.5, 1, 5, 200):
        assert i_p(psi, p) == pytest.approx((1 + p) ** (-1 / p), rel=1e-10)


def test_quadrature_spec_roundtrip_and_validation():
    q = QuadratureSpec.from_dict({"eta": 0.1, "jacobi_nodes": 32})
    assert QuadratureSpec.from_dict(q.to_dict()) == q
    with pytest.raises(ValueError):
        QuadratureSpec.from_dict({"bogus": 1})
    with pytest.raises(ValueError):
        QuadratureSpec(eta=-1)


def test_quadrature_failure_reports_bound():
    g = CovariogramFn(box([0, 0], [1, 1]))
    with pytest.raises(QuadratureError) as err:
        ball_gauge(g, 1, np.array([0.3, 0.7]), QuadratureSpec(legendre_tol=1e-16, max_level=1,
                                                             legendre_nodes=2))
    assert err.value.achieved > 0


def test_threads_do_not_change_results(monkeypatch):
    g = CovariogramFn(box([0, 0], [1, 1]))
    D = DirectionGrid.make(2, 300).directions
    q = QuadratureSpec(chunk=64)
    serial = ball_gauge(g, -0.5, D, q)
    monkeypatch.setenv("RADIAL_BODIES_THREADS", "4")
    np.testing.assert_array_equal(ball_gauge(g, -0.5, D, q), serial)
