"""Radial p-th mean bodies R_pK = K_p(g_K).

Two routes: the covariogram route (quadrature along rays of g_K) and the
direct Monte Carlo route over uniform points y of K, which averages
‖x‖_{K-y}^{-p}.  Their agreement is the Fubini identity checked in
``verify``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .ballbody import PIndex, QuadratureSpec, StarGauge, ball_gauge
from .geometry import ConvexBody, DirectionGrid, sample_points
from .geometry.bodies import BALL
from .logconcave import CovariogramFn, Measure, generalized_covariogram

MIN_MC_SAMPLES = 1000
MAX_REJECTED_FRACTION = 1e-4


class MCResult(NamedTuple):
    value: float
    stderr: float
    rejected: int
    finite_variance: bool


def covariogram_function(K: ConvexBody, measure: Measure | None = None):
    """g_K, or the weighted covariogram x -> mu(K ∩ (K + x))."""
    if measure is None:
        return CovariogramFn(K)
    return generalized_covariogram("weighted", body=K, measure=measure)


def radial_mean_gauge(K: ConvexBody, p, x, q: QuadratureSpec | None = None,
                      measure: Measure | None = None, g=None):
    """‖x‖_{R_pK}; pass a prebuilt covariogram ``g`` to reuse it across calls."""
    g = g if g is not None else covariogram_function(K, measure)
    return ball_gauge(g, p, x, q)


def radial_mean_samples(K: ConvexBody, p, grid: DirectionGrid,
                        q: QuadratureSpec | None = None) -> StarGauge:
    g = covariogram_function(K)
    P = PIndex.parse(p)
    gauges = np.asarray(ball_gauge(g, P, grid.directions, q)).reshape(len(grid))
    with np.errstate(divide="ignore"):
        radii = 1.0 / gauges
    return StarGauge(K.dimension, lambda X: ball_gauge(g, P, X, q), grid, radii,
                     label=f"R_{P.value:g}K")


def _gauges_from(K: ConvexBody, Y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """‖x‖_{K-y} for each row y of Y (vectorised over y)."""
    if K.kind == BALL:
        c = K.center[None, :] - Y
        R = K.radius
        alpha = (c * c).sum(1) - R * R
        beta = c @ x
        gam = float(x @ x)
        disc = beta * beta - alpha * gam
        with np.errstate(invalid="ignore", divide="ignore"):
            out = gam / (beta + np.sqrt(np.maximum(disc, 0.0)))
        return np.where(alpha < 0, out, np.inf)
    offs = K.offsets[None, :] - Y @ K.normals.T      # > 0 for interior y
    ax = K.normals @ x
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(offs > 0, ax[None, :] / offs, np.where(ax[None, :] > 0, np.inf, 0.0))
    return np.maximum(ratio.max(1), 0.0)


def radial_mean_direct_mc(K: ConvexBody, p, x, N: int = 1_000_000, seed: int = 0,
                          batch: int = 250_000) -> MCResult:
    """Monte Carlo estimate of ‖x‖_{R_pK} from uniform points of K.

    p != 0: (mean of ‖x‖_{K-y}^{-p})^{-1/p}; p = 0: exp(mean of log ‖x‖_{K-y}).
    The standard error is the delta-method image of the inner mean's error.
    The inner variance is finite only for p > -1/2.
    """
    P = PIndex.parse(p)
    if P.branch == "infinity":
        raise ValueError("direct Monte Carlo needs a finite p")
    if N < MIN_MC_SAMPLES:
        raise ValueError(f"N = {N} is too small for a standard error (need >= {MIN_MC_SAMPLES})")
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        return MCResult(0.0, 0.0, 0, True)
    rng = np.random.default_rng(seed)
    zero = P.branch == "zero"
    pv = P.value
    s1 = s2 = 0.0
    count = rejected = 0
    done = 0
    while done < N:
        k = min(batch, N - done)
        Y = sample_points(K, rng, k)
        G = _gauges_from(K, Y, x)
        ok = np.isfinite(G) & (G > 0)
        rejected += int(k - ok.sum())
        G = G[ok]
        vals = np.log(G) if zero else G ** (-pv)
        s1 += vals.sum()
        s2 += (vals * vals).sum()
        count += len(vals)
        done += k
    if rejected > MAX_REJECTED_FRACTION * N:
        raise RuntimeError(f"{rejected} of {N} samples gave a non-finite gauge")
    mean = s1 / count
    var = max(s2 / count - mean * mean, 0.0) * count / (count - 1)
    se_mean = math.sqrt(var / count)
    if zero:
        val = math.exp(mean)
        se = val * se_mean
    else:
        val = mean ** (-1.0 / pv)
        se = abs(val / (pv * mean)) * se_mean
    return MCResult(val, se, rejected, pv > -0.5)


def scaled_limit_samples(K: ConvexBody, p, grid: DirectionGrid,
                         q: QuadratureSpec | None = None) -> StarGauge:
    """Radii (1+p)^{1/p} rho_{R_pK}(theta) for p near -1."""
    P = PIndex.parse(p)
    if not (-1 < P.value <= -0.9):
        raise ValueError("scaled limit samples need p in (-1, -0.9]")
    base = radial_mean_samples(K, P, grid, q)
    factor = (1 + P.value) ** (1 / P.value)
    radii = factor * base.radii
    return StarGauge(K.dimension, lambda X: base(X) / factor, grid, radii,
                     label=f"(1+p)^(1/p) R_{P.value:g}K")
