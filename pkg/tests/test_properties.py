"""Property-based checks of homogeneity, evenness, monotonicity and convexity."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from radialbodies.ballbody import ball_gauge
from radialbodies.geometry import box, covariogram, polytope, random_polygon
from radialbodies.logconcave import CovariogramFn, Gaussian, QuadraticExponential

SQUARE = CovariogramFn(box([0, 0], [1, 1]))
TRIANGLE = CovariogramFn(polytope([[0, 0], [1, 0], [0, 1]]))
QE = QuadraticExponential.from_coefficients(1.0, 0.5, 0.6)

coord = st.floats(-3, 3, allow_nan=False)
points = st.tuples(coord, coord).filter(lambda v: np.hypot(*v) > 1e-3).map(np.array)
ps = st.sampled_from([-0.75, -0.5, -0.25, 0.0, 0.5, 1.0, 2.0, 5.0])
fns = st.sampled_from([SQUARE, TRIANGLE, QE, Gaussian(np.eye(2))])


@settings(max_examples=60, deadline=None)
@given(fns, ps, points, st.floats(0.01, 50))
def test_gauge_homogeneous(g, p, x, lam):
    a = ball_gauge(g, p, lam * x)
    b = lam * ball_gauge(g, p, x)
    assert abs(a - b) <= 1e-9 * b


@settings(max_examples=40, deadline=None)
@given(fns, ps, points, points)
def test_gauge_subadditive(g, p, u, v):
    if np.hypot(*(u + v)) < 1e-6:
        return
    gu, gv, gw = ball_gauge(g, p, np.array([u, v, u + v]))
    assert gw <= gu + gv + 1e-7 * (gu + gv)


@settings(max_examples=40, deadline=None)
@given(fns, points, st.sampled_from([(-0.5, 0.5), (0.0, 1.0), (1.0, 5.0), (-0.75, -0.25)]))
def test_gauge_monotone_in_p(g, x, pq):
    p, q = pq
    assert ball_gauge(g, p, x) >= ball_gauge(g, q, x) * (1 - 1e-7)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), points)
def test_covariogram_even_and_maximal_at_origin(seed, x):
    K = random_polygon(np.random.default_rng(seed), 6)
    x = x / 3
    a, b = covariogram(K, x), covariogram(K, -x)
    assert abs(a - b) <= 1e-10
    assert a <= covariogram(K, np.zeros(2)) * (1 + 1e-12)
