import math

import numpy as np
import pytest

from radialbodies.geometry import DirectionGrid, box, interval, polar_projection_gauge, polytope
from radialbodies.logconcave import Gaussian, Measure
from radialbodies.radialmean import (radial_mean_direct_mc, radial_mean_gauge,
                                     radial_mean_samples, scaled_limit_samples)


def test_radial_mean_gauge_examples(square):
    assert radial_mean_gauge(interval(0, 1), 1, [1.0]) == pytest.approx(2)
    assert radial_mean_gauge(square, 1, [1.0, 0]) == pytest.approx(2)
    # profile (1-r)^2 along (1,1): gauge (∫ (1-r)^2 dr)^{-1} = 3
    assert radial_mean_gauge(square, 1, [1.0, 1.0]) == pytest.approx(3)


def test_radial_mean_gauge_is_even(triangle):
    rng = np.random.default_rng(0)
    X = rng.standard_normal((20, 2))
    for p in (-0.5, 0, 2):
        np.testing.assert_allclose(radial_mean_gauge(triangle, p, X), radial_mean_gauge(triangle, p, -X),
                                   rtol=1e-9)


def test_direct_mc_examples(square, triangle):
    est = radial_mean_direct_mc(square, 1, [1.0, 0], 1_000_000, seed=1)
    assert abs(est.value - 2) < 3 * est.stderr
    est = radial_mean_direct_mc(triangle, -0.5, [1.0, 0], 1_000_000, seed=1)
    assert abs(est.value - radial_mean_gauge(triangle, -0.5, [1.0, 0])) < 3 * est.stderr
    assert radial_mean_direct_mc(square, 1, [0.0, 0.0], 10_000).value == 0


def test_direct_mc_log_form(triangle):
    x = np.array([0.3, 0.5])
    est = radial_mean_direct_mc(triangle, 0, x, 400_000, seed=2)
    assert abs(est.value - radial_mean_gauge(triangle, 0, x)) < 4 * est.stderr


def test_direct_mc_needs_samples(square):
    with pytest.raises(ValueError, match="too small"):
        radial_mean_direct_mc(square, 1, [1.0, 0], 100)


def test_direct_mc_ball_body():
    from radialbodies.geometry import ball
    K = ball([0, 0, 0], 1.0)
    x = np.array([0.3, 0.5, 0.1])
    est = radial_mean_direct_mc(K, 0.7, x, 300_000, seed=3)
    assert abs(est.value - radial_mean_gauge(K, 0.7, x)) < 4 * est.stderr


def test_weighted_variant_by_composition(square):
    flat = Measure(Gaussian(np.eye(2) * 1e8))
    x = np.array([0.4, 0.2])
    assert radial_mean_gauge(square, 1, x, measure=flat) == pytest.approx(
        radial_mean_gauge(square, 1, x), rel=1e-6)


def test_scaled_limit_segment_is_one():
    S = scaled_limit_samples(interval(0, 1), -0.95, DirectionGrid.make(1, 2))
    np.testing.assert_allclose(S.radii, 1, rtol=1e-10)


def test_scaled_limit_square_matches_polar_projection(square):
    grid = DirectionGrid.make(2, 16)
    S = scaled_limit_samples(square, -0.999, grid)
    pp = np.array([1 / polar_projection_gauge(square, t) for t in grid.directions])
    assert np.max(np.abs(S.radii - pp) / pp) < 0.01


def test_scaled_limit_triangle_tends_to_volume_times_polar_projection(triangle):
    grid = DirectionGrid.make(2, 16)
    S = scaled_limit_samples(triangle, -0.999, grid)
    pp = np.array([1 / polar_projection_gauge(triangle, t) for t in grid.directions])
    assert S.radii[0] == pytest.approx(0.5, rel=0.01)
    assert np.max(np.abs(S.radii - 0.5 * pp) / (0.5 * pp)) < 0.01


def test_scaled_limit_range_check(square):
    with pytest.raises(ValueError):
        scaled_limit_samples(square, -0.5, DirectionGrid.make(2, 8))


def test_radial_mean_samples_axis_radii(square):
    S = radial_mean_samples(square, 1, DirectionGrid.make(2, 64))
    assert S.radii[0] == pytest.approx(0.5, abs=1e-6)
    assert S.radii[16] == pytest.approx(0.5, abs=1e-6)
