"""Covariograms, difference bodies and fast covariogram ray profiles.

``covariogram`` is the reference evaluator (clipping, closed forms, or Monte
Carlo).  :class:`CovariogramRays` evaluates r -> g_K(r*theta) for batches of
directions with piecewise closed forms, which is what the quadrature engine
needs; each path is cross-checked against clipping in the test suite.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import ConvexHull
from scipy.special import betainc

from .bodies import (BALL, BOX, ConvexBody, GeometryError, MCEstimate, ball,
                     ball_volume, box, minkowski_functional, polytope, volume)
from .clipping import clipped_polygon, clipped_volume, polygon_width

DEGENERATE_FRACTION = 1e-14


def _ball_overlap(n: int, R: float, d):
    """Vol(B(0,R) ∩ B(d e1, R)) for distances d >= 0."""
    d = np.asarray(d, dtype=float)
    z = np.clip(1.0 - d * d / (4 * R * R), 0.0, 1.0)
    return np.where(d < 2 * R, ball_volume(n, R) * betainc((n + 1) / 2, 0.5, z), 0.0)


def covariogram(K: ConvexBody, x, method: str = "exact", samples: int = 200_000,
                seed: int = 0):
    """g_K(x) = Vol(K ∩ (K + x)).

    ``x`` may be a single point or an array of points.  The Monte Carlo path
    counts hits of K ∩ (K + x) in the bounding box of K and returns
    :class:`MCEstimate` values.
    """
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != K.dimension:
        raise GeometryError("point dimension does not match the body")
    if method == "monte-carlo":
        rng = np.random.default_rng(seed)
        lo, hi = K.bounding_box
        vol_box = float(np.prod(hi - lo))
        pts = rng.uniform(lo, hi, size=(samples, K.dimension))
        base = K.contains(pts)
        out = []
        for xi in X:
            hit = base & K.contains(pts - xi)
            f = hit.mean()
            out.append(MCEstimate(vol_box * f, vol_box * math.sqrt(f * (1 - f) / samples)))
        return out[0] if single else out
    if method != "exact":
        raise ValueError(f"unknown covariogram method {method!r}")
    if K.kind == BALL:
        vals = _ball_overlap(K.dimension, K.radius, np.linalg.norm(X, axis=1))
    elif K.kind == BOX:
        vals = np.prod(np.clip(K.hi - K.lo - np.abs(X), 0.0, None), axis=1)
    else:
        if K.dimension > 3:
            raise GeometryError("exact covariogram needs n <= 3; use method='monte-carlo'")
        vol = volume(K)
        vals = np.empty(len(X))
        for i, xi in enumerate(X):
            offs = K.offsets + np.minimum(0.0, K.normals @ xi)
            v = clipped_volume(K, offs)
            vals[i] = v if v > DEGENERATE_FRACTION * vol else 0.0
    return float(vals[0]) if single else vals


def multi_covariogram(K: ConvexBody, xs, method: str = "exact", samples: int = 200_000,
                      seed: int = 0):
    """Vol(K ∩ (K + x_1) ∩ ... ∩ (K + x_m)) for xs of shape (m, n)."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    m, n = xs.shape
    if n != K.dimension:
        raise GeometryError("point dimension does not match the body")
    if method == "monte-carlo":
        rng = np.random.default_rng(seed)
        lo, hi = K.bounding_box
        vol_box = float(np.prod(hi - lo))
        pts = rng.uniform(lo, hi, size=(samples, n))
        hit = K.contains(pts)
        for xi in xs:
            hit &= K.contains(pts - xi)
        f = hit.mean()
        return MCEstimate(vol_box * f, vol_box * math.sqrt(f * (1 - f) / samples))
    if n * m > 6:
        raise GeometryError("n*m > 6 in exact mode: use monte-carlo mode")
    if K.kind == BALL:
        if m == 1:
            return covariogram(K, xs[0])
        raise GeometryError("ball intersections of several translates: use monte-carlo mode")
    if K.kind == BOX:
        lo = np.maximum(K.lo, K.lo + xs.max(0))
        hi = np.minimum(K.hi, K.hi + xs.min(0))
        return float(np.prod(np.clip(hi - lo, 0.0, None)))
    shift = np.minimum(0.0, (xs @ K.normals.T).min(0))
    v = clipped_volume(K, K.offsets + shift)
    return v if v > DEGENERATE_FRACTION * volume(K) else 0.0


# -------------------------------------------------------------- difference body


def difference_body(K: ConvexBody) -> ConvexBody:
    """DK = K + (-K)."""
    if K.kind == BALL:
        return ball(np.zeros(K.dimension), 2 * K.radius)
    if K.kind == BOX:
        w = K.hi - K.lo
        return box(-w, w)
    V = K.vertices
    diffs = (V[:, None, :] - V[None, :, :]).reshape(-1, K.dimension)
    if K.dimension > 1:
        diffs = diffs[ConvexHull(diffs).vertices]
    return polytope(diffs)


def difference_body_gauge(K: ConvexBody, x, method: str = "exact", iterations: int = 60):
    """‖x‖_{DK}.

    ``exact`` builds DK (Minkowski sum of K and -K) and takes its Minkowski
    functional.  ``bisection`` locates the end of {r : g_K(r x) > 0} along the
    ray instead, which only needs the covariogram.
    """
    X = np.asarray(x, dtype=float)
    if method == "exact":
        return minkowski_functional(difference_body(K), X)
    if method != "bisection":
        raise ValueError(f"unknown method {method!r}")
    single = X.ndim == 1
    X = np.atleast_2d(X)
    out = np.zeros(len(X))
    for i, xi in enumerate(X):
        nx = np.linalg.norm(xi)
        if nx == 0:
            continue
        lo, hi = 0.0, 1.01 * K.diameter / nx
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            if _raw_overlap(K, mid * xi) > 0:
                lo = mid
            else:
                hi = mid
        out[i] = 1.0 / (0.5 * (lo + hi))
    return float(out[0]) if single else out


def _raw_overlap(K: ConvexBody, x) -> float:
    # Positivity predicate for bisection.  Areas of thin intersections are
    # swamped by rounding (they can scale like the square of the gap), so
    # planar polygons report their width, which scales linearly.
    if K.kind in (BALL, BOX) or K.dimension > 3:
        return covariogram(K, x)
    offs = K.offsets + np.minimum(0.0, K.normals @ x)
    if K.dimension == 2:
        return polygon_width(clipped_polygon(K, offs)) - 1e-15 * K.diameter
    return clipped_volume(K, K.offsets + np.minimum(0.0, K.normals @ x))


# ------------------------------------------------------------------ ray profiles


class CovariogramRays:
    """Batch evaluator of r -> g_K(r theta) along many directions.

    Every method takes ``thetas`` of shape (m, n) (unit rows).  ``values``
    takes radii of shape (m, q).  ``knots`` returns interior break points of
    the piecewise description, shape (m, k), padded with NaN.
    """

    def __init__(self, K: ConvexBody):
        self.body = K
        self.volume = volume(K) if (K.dimension <= 3 or K.kind in (BALL, BOX) or K.is_simplex) else None
        n = K.dimension
        if K.kind == BALL:
            self.path = "ball"
        elif K.kind == BOX:
            self.path = "box"
        elif K.is_simplex:
            self.path = "simplex"
            self._weights = K.facet_areas / (n * self.volume)
        elif n == 2:
            self.path = "polygon"
        elif n == 3:
            self.path = "clip"
        else:
            raise GeometryError("exact covariogram profiles need n <= 3 for general polytopes")
        self._dk = difference_body(K)

    def support_end(self, thetas) -> np.ndarray:
        T = np.atleast_2d(np.asarray(thetas, dtype=float))
        K = self.body
        if self.path == "ball":
            return np.full(len(T), 2 * K.radius)
        if self.path == "box":
            with np.errstate(divide="ignore"):
                return np.min((K.hi - K.lo) / np.abs(T), axis=1)
        if self.path == "simplex":
            neg = np.maximum(0.0, -(T @ K.normals.T))
            return 1.0 / (neg @ self._weights)
        return 1.0 / minkowski_functional(self._dk, T)

    def knots(self, thetas) -> np.ndarray:
        T = np.atleast_2d(np.asarray(thetas, dtype=float))
        if self.path != "polygon":
            return np.full((len(T), 0), np.nan)
        _, chords = self._chords(T)
        tau = chords.max(1, keepdims=True)
        k = np.where((chords > 1e-12 * tau) & (chords < tau * (1 - 1e-12)), chords, np.nan)
        return np.sort(k, axis=1)

    def values(self, thetas, r) -> np.ndarray:
        T = np.atleast_2d(np.asarray(thetas, dtype=float))
        R = np.asarray(r, dtype=float)
        if R.ndim == 1:
            R = np.broadcast_to(R, (len(T), len(R)))
        K = self.body
        if self.path == "ball":
            return _ball_overlap(K.dimension, K.radius, np.abs(R))
        if self.path == "box":
            w = K.hi - K.lo
            ext = w[None, None, :] - np.abs(R[..., None] * T[:, None, :])
            return np.prod(np.clip(ext, 0.0, None), axis=-1)
        if self.path == "simplex":
            neg = np.maximum(0.0, -(T @ K.normals.T)) @ self._weights
            lam = np.clip(1.0 - R * neg[:, None], 0.0, None)
            return self.volume * lam ** K.dimension
        if self.path == "polygon":
            return self._polygon_values(T, R)
        out = np.empty(R.shape)
        for i, th in enumerate(T):
            out[i] = covariogram(K, R[i][:, None] * th[None, :])
        return out

    # 2D: g_K(r theta) = integral over the shadow of (chord length - r)_+.
    def _chords(self, T):
        K = self.body
        perp = np.column_stack([-T[:, 1], T[:, 0]])
        s = perp @ K.vertices.T                                   # (m, V)
        slack = np.maximum(K.offsets[None, :] - K.vertices @ K.normals.T, 0.0)  # (V, F)
        at = T @ K.normals.T                                      # (m, F)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = slack[None, :, :] / at[:, None, :]
        pos = (at > 1e-15)[:, None, :]
        neg = (at < -1e-15)[:, None, :]
        tmax = np.min(np.where(pos, ratio, np.inf), axis=2)
        tmin = np.max(np.where(neg, ratio, -np.inf), axis=2)
        chords = np.maximum(tmax - tmin, 0.0)
        order = np.argsort(s, axis=1)
        return np.take_along_axis(s, order, 1), np.take_along_axis(chords, order, 1)

    def _polygon_values(self, T, R):
        s, ch = self._chords(T)
        ds = np.diff(s, axis=1)[:, :, None]                       # (m, P, 1)
        l0 = np.minimum(ch[:, :-1], ch[:, 1:])[:, :, None]
        l1 = np.maximum(ch[:, :-1], ch[:, 1:])[:, :, None]
        r = R[:, None, :]
        full = (l0 + l1) / 2 - r
        with np.errstate(divide="ignore", invalid="ignore"):
            part = (l1 - r) ** 2 / (2 * (l1 - l0))
        piece = np.where(r <= l0, full, np.where(r >= l1, 0.0, part))
        return np.sum(ds * piece, axis=1)
