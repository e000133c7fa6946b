"""Acceptance criteria 1-11, each at its stated tolerance.

Every test prints one line ``CRITERION k: PASS|FAIL ...`` (also collected in
the terminal summary) and then asserts the criterion.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from radialbodies.ballbody import (StarGauge, ball_gauge, gaussian_radius, i_p)
from radialbodies.ballbody.gauge import RICHARDSON_STEP
from radialbodies.geometry import (DirectionGrid, box, interval, minkowski_functional, polytope,
                                   random_polygon)
from radialbodies.logconcave import (CovariogramFn, Gaussian, Indicator, QuadraticExponential,
                                     RayProfile)
from radialbodies.radialmean import radial_mean_direct_mc, radial_mean_gauge
from radialbodies.verify import (check_det_inequality, check_H_inequality, check_ip_properties,
                                 check_limits, check_mollify_convergence, check_monotonicity,
                                 check_subadditivity, quadratic_exponential_2d,
                                 random_quadratic_exponential)


def record(capsys, k, ok, msg):
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} {msg}"
    ACCEPTANCE_LINES.append(line)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


SQUARE = box([0, 0], [1, 1])
TRIANGLE = polytope([[0, 0], [1, 0], [0, 1]])
HEXAGON = random_polygon(np.random.default_rng(2024), 6)
CUBE = box(np.zeros(3), np.ones(3))
SIMPLEX3 = polytope(np.vstack([np.zeros(3), np.eye(3)]))


def test_criterion_1_segment_closed_form(capsys):
    t0 = time.perf_counter()
    g = CovariogramFn(interval(0, 1))
    worst = 0.0
    for p in (-0.9, -0.5, -0.1, 0, 0.5, 1, 2, 5):
        rho = 1 / ball_gauge(g, p, np.array([1.0]))
        exact = math.exp(-1) if p == 0 else (1 + p) ** (-1 / p)
        worst = max(worst, abs(rho - exact) / exact)
    dt = time.perf_counter() - t0
    record(capsys, 1, worst <= 1e-6 and dt < 1.0,
           f"segment radial vs (1+p)^(-1/p): max rel err {worst:.2e} (tol 1e-6), {dt:.3f}s (< 1s)")


def test_criterion_2_indicator_fixed_point(capsys):
    K = random_polygon(np.random.default_rng(7), 7)
    g = Indicator(K)
    D = DirectionGrid.make(2, 64).directions
    ref = minkowski_functional(K, D)
    worst = max(np.max(np.abs(ball_gauge(g, p, D) - ref) / ref) for p in (-0.5, 0, 1))
    record(capsys, 2, worst <= 1e-8, f"K_p(indicator) vs polygon gauge, 64 dirs: max rel err {worst:.2e} (tol 1e-8)")


def test_criterion_3_gaussian_radii(capsys):
    g = Gaussian(np.eye(2))
    D = DirectionGrid.make(2, 64).directions
    worst = 0.0
    for p in (-0.5, 1, 2):
        exact = (p * 2 ** (p / 2 - 1) * math.gamma(p / 2)) ** (1 / p)
        worst = max(worst, np.max(np.abs(1 / ball_gauge(g, p, D) - exact)))
    assert gaussian_radius(2) == pytest.approx(math.sqrt(2))
    record(capsys, 3, worst <= 1e-6, f"Gaussian radii vs Gamma oracle: max abs err {worst:.2e} (tol 1e-6)")


def test_criterion_4_convexity_negative_p(capsys):
    t0 = time.perf_counter()
    worst, where = 0.0, ""
    bodies = {"square": SQUARE, "triangle": TRIANGLE, "hexagon": HEXAGON, "cube": CUBE,
              "simplex3": SIMPLEX3}
    for name, K in bodies.items():
        g = CovariogramFn(K)
        for p in (-0.75, -0.5, -0.25):
            G = StarGauge(K.dimension, lambda X, g=g, p=p: ball_gauge(g, p, X))
            r = check_subadditivity(G, 10_000, seed=1)
            if r.worst_violation >= worst:
                worst, where = r.worst_violation, f"{name}, p={p}"
    dt = time.perf_counter() - t0
    record(capsys, 4, worst <= 1e-5 and dt < 120,
           f"subadditivity, 5 bodies x 3 p x 1e4 pairs: worst {worst:.2e} ({where}) (tol 1e-5), {dt:.1f}s (< 120s)")


def test_criterion_5_determinant_inequality(capsys):
    rng = np.random.default_rng(5)
    worst = -math.inf
    for _ in range(20):
        f = random_quadratic_exponential(rng)
        for p in (-0.5, 0.5, 1, 2):
            r = check_det_inequality(f, p)
            d = r.details
            worst = max(worst, d["det"] / d["scale"] ** 2)
    analytic = check_det_inequality(quadratic_exponential_2d(1, 1), 1).details["det"]
    err = abs(analytic + math.pi / 2)
    record(capsys, 5, worst <= 1e-6 and err <= 1e-6,
           f"max (AC-B^2)/scale^2 over 80 instances {worst:.3e} (tol 1e-6); analytic det {analytic:.9f} vs -pi/2 (err {err:.1e})")


def test_criterion_6_fubini(capsys):
    rng = np.random.default_rng(6)
    bodies = [SQUARE, TRIANGLE, HEXAGON, CUBE, SIMPLEX3]
    worst, misses = 0.0, 0
    for i in range(32):
        K = bodies[i % len(bodies)]
        p = float(rng.uniform(-0.45, 3.0))
        x = rng.standard_normal(K.dimension)
        quad = radial_mean_gauge(K, p, x)
        mc = radial_mean_direct_mc(K, p, x, 1_000_000, seed=100 + i)
        z = abs(mc.value - quad) / mc.stderr
        worst = max(worst, z)
        misses += z > 3
    record(capsys, 6, misses == 0, f"direct MC vs quadrature on 32 instances: worst |z| {worst:.2f} (tol 3 std errors)")


def test_criterion_7_limits(capsys):
    grid = DirectionGrid.make(2, 64)
    parts, ok = [], True
    for name, K in (("square", SQUARE), ("triangle", TRIANGLE)):
        r = check_limits(K, grid)
        d = r.details
        ok &= r.passed
        parts.append(f"{name}: p=200 vs DK {d['difference_body_deviation']:.2%}, "
                     f"p=-0.999 vs polar projection {d['polar_projection_deviation']:.2%}")
    record(capsys, 7, ok, "; ".join(parts) + " (tol 1%)")


def test_criterion_8_monotonicity_continuity(capsys):
    grid = DirectionGrid.make(2, 64)
    p_grid = [-0.9, -0.75, -0.5, -0.25, 0, 0.5, 1, 2, 5]
    worst, cont = 0.0, 0.0
    for g in (CovariogramFn(TRIANGLE), CovariogramFn(HEXAGON), QuadraticExponential.from_coefficients(1, 0.5, 0.6)):
        r = check_monotonicity(g, p_grid, grid)
        worst = max(worst, r.details["max_relative_increase"])
        cont = max(cont, r.details["zero_branch_deviation"])
    record(capsys, 8, worst <= 1e-7 and cont <= 5e-3,
           f"9-point p-grid, 64 dirs: max relative increase {worst:.2e} (tol 1e-7); "
           f"p=0 vs p=+-{RICHARDSON_STEP:g} {cont:.2e} (tol 5e-3)")


def test_criterion_9_mollification(capsys):
    probes2 = np.array([[1.0, 0], [0.6, 0.8], [-0.3, 0.95], [0, -1.0]])
    cases = [(Gaussian(np.eye(2)), probes2), (CovariogramFn(SQUARE), probes2),
             (Indicator(interval(-1, 1)), np.array([[1.0], [-1.0]]))]
    ok, closed_dev, parts = True, 0.0, []
    for g, probes in cases:
        for p in (-0.5, 1):
            r = check_mollify_convergence(g, p, [4, 16, 64, 256], probes)
            E = r.details["errors"]
            ok &= bool(np.all(np.isfinite(E)) and np.all(E[-1] < E[0]))
            parts.append(f"{g.family} p={p}: e4 {E[0].max():.1e} -> e256 {E[-1].max():.1e}")
            if "closed_form_deviation" in r.details:
                closed_dev = max(closed_dev, r.details["closed_form_deviation"])
    ok &= closed_dev <= 1e-4
    record(capsys, 9, ok, "; ".join(parts) + f"; Gaussian vs closed form {closed_dev:.1e} (tol 1e-4)")


def test_criterion_10_H_inequality(capsys):
    rng = np.random.default_rng(10)
    fns = [Gaussian(np.array([[1.0, 0.3], [0.3, 0.7]])), QuadraticExponential.from_coefficients(1, 0.5, 0.6),
           CovariogramFn(SQUARE), CovariogramFn(TRIANGLE), CovariogramFn(HEXAGON)]
    fails, collinear, equal = 0, 0, 0
    for i in range(100):
        g = fns[i % len(fns)]
        p = float(rng.choice([-0.75, -0.5, -0.25, 0.5, 1, 2, 5]))
        u = rng.standard_normal(2) * 0.3
        th = u.copy() if i % 5 == 0 else rng.standard_normal(2)
        r = check_H_inequality(g, p, u, th)
        fails += not r.passed
        if r.details["collinear"]:
            collinear += 1
            equal += r.details["equality_within_budget"]
    record(capsys, 10, fails == 0 and equal == collinear,
           f"{100 - fails}/100 instances pass with stencil budget; collinear equality {equal}/{collinear}")


def test_criterion_11_ip_properties(capsys):
    both = [-0.9, -0.75, -0.5, -0.25, 0, 0.5, 1, 2, 5, 20]
    profiles = {
        "exp": RayProfile.from_callable(lambda r: np.exp(-r)),
        "gauss": RayProfile.from_callable(lambda r: np.exp(-r * r)),
        "tent": RayProfile.from_callable(lambda r: np.maximum(1 - r, 0), 1.0),
        "indicator": RayProfile.from_callable(lambda r: (r <= 0.7) * 1.0, 0.7),
    }
    mono = 0.0
    for psi in profiles.values():
        I = np.array([i_p(psi, p) for p in both])
        mono = max(mono, float(np.max((I[:-1] - I[1:]) / I[:-1])))
    const = max(abs(i_p(profiles["indicator"], p) - 0.7) / 0.7 for p in both)
    lim = 0.0
    for R in (0.3, 1.0, 4.0):
        psi = RayProfile.from_callable(lambda r, R=R: (r <= R) * 1.0, R)
        lim = max(lim, abs(i_p(psi, 200) - R) / R)
        assert check_ip_properties(psi, both).passed
    record(capsys, 11, mono <= 1e-9 and const <= 1e-9 and lim <= 0.01,
           f"I_p monotone in both regimes (max decrease {mono:.1e}); indicator constancy {const:.1e}; "
           f"I_200(chi_[0,R]) vs R {lim:.1e} (tol 1%)")
