"""Covariogram-type log-concave functions built from bodies and functions."""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ..geometry import ConvexBody, CovariogramRays, GeometryError, covariogram, volume
from ..geometry.bodies import BOX
from ..geometry.clipping import clip_points, clipped_polygon
from ..geometry.covariogram import difference_body, multi_covariogram
from .functions import ALL_SPACE, FunctionError, Indicator, LogConcaveFn, Measure

KINDS = ("classical", "weighted", "l1", "l2", "m-order", "l1-m-order")


class CovariogramFn(LogConcaveFn):
    """g_K(x) = Vol(K ∩ (K + x)), with exact ray profiles when available.

    ``samples``/``seed`` switch to a fixed-sample Monte Carlo estimator
    (needed for general polytopes in dimension > 3).
    """

    family = "covariogram"

    def __init__(self, K: ConvexBody, samples: int | None = None, seed: int = 0):
        self.body = K
        self.samples = samples
        self.seed = seed
        self.rays = None
        if samples is None:
            try:
                self.rays = CovariogramRays(K)
            except GeometryError:
                samples = self.samples = 200_000
        if samples is not None:
            rng = np.random.default_rng(seed)
            lo, hi = K.bounding_box
            self._pts = rng.uniform(lo, hi, size=(samples, K.dimension))
            self._pts = self._pts[K.contains(self._pts)]
            self._box = float(np.prod(hi - lo))
            origin = self._box * len(self._pts) / samples
        else:
            origin = self.rays.volume
            self.exact_knots = self.rays.path in ("polygon", "box", "simplex", "ball")
        super().__init__(K.dimension, origin, support_hint=difference_body(K))

    def _eval(self, X):
        if self.samples is None:
            return np.asarray(covariogram(self.body, X), dtype=float).reshape(len(X))
        out = np.empty(len(X))
        for i, x in enumerate(X):
            out[i] = self._box * np.count_nonzero(self.body.contains(self._pts - x)) / self.samples
        return out

    def ray_values(self, thetas, r):
        if self.rays is None:
            return super().ray_values(thetas, r)
        return self.rays.values(thetas, r)

    def ray_support_end(self, thetas):
        if self.rays is None:
            return super().ray_support_end(thetas)
        return self.rays.support_end(thetas)

    def ray_knots(self, thetas):
        if self.rays is None:
            return super().ray_knots(thetas)
        return self.rays.knots(thetas)

    def to_spec(self):
        spec = {"kind": "classical", "body": self.body.to_spec()}
        if self.samples is not None:
            spec.update(samples=self.samples, seed=self.seed)
        return {"covariogram": spec}


# ---------------------------------------------------------- simplex quadrature


def _simplex_rule(n: int, order: int):
    """Collapsed Gauss–Legendre rule on the unit n-simplex (n = 1, 2, 3)."""
    x, w = np.polynomial.legendre.leggauss(order)
    x, w = (x + 1) / 2, w / 2
    if n == 1:
        return x[:, None], w
    if n == 2:
        u, v = np.meshgrid(x, x, indexing="ij")
        wu, wv = np.meshgrid(w, w, indexing="ij")
        pts = np.column_stack([u.ravel(), (v * (1 - u)).ravel()])
        return pts, (wu * wv * (1 - u)).ravel()
    u, v, t = np.meshgrid(x, x, x, indexing="ij")
    wu, wv, wt = np.meshgrid(w, w, w, indexing="ij")
    p0 = u
    p1 = v * (1 - u)
    p2 = t * (1 - u) * (1 - v)
    pts = np.column_stack([p0.ravel(), p1.ravel(), p2.ravel()])
    return pts, (wu * wv * wt * (1 - u) ** 2 * (1 - v)).ravel()


def _integrate_over_hull(f, pts: np.ndarray, order: int) -> float:
    """∫ f over conv(pts) by a fan triangulation and collapsed Gauss rules."""
    n = pts.shape[1]
    if n == 1:
        lo, hi = pts.min(), pts.max()
        if hi <= lo:
            return 0.0
        x, w = _simplex_rule(1, order)
        return float((hi - lo) * np.dot(w, f(lo + (hi - lo) * x)))
    try:
        hull = ConvexHull(pts)
    except QhullError:
        return 0.0
    ref, w = _simplex_rule(n, order)
    apex = pts[hull.vertices].mean(0)
    total = 0.0
    for face in (pts[s] for s in hull.simplices):
        verts = np.vstack([apex, face])
        E = (verts[1:] - verts[0]).T
        jac = abs(np.linalg.det(E))
        if jac == 0:
            continue
        y = verts[0] + ref @ E.T
        total += jac * np.dot(w, f(y))
    return float(total)


class WeightedCovariogramFn(LogConcaveFn):
    """x -> mu(K ∩ (K + x)) for a measure mu with log-concave density."""

    family = "weighted-covariogram"

    def __init__(self, K: ConvexBody, mu: Measure, samples: int | None = None, seed: int = 0,
                 order: int = 10):
        if K.kind not in ("polytope", BOX) or K.dimension > 3:
            if samples is None:
                raise FunctionError("weighted covariogram of this body needs samples (Monte Carlo)")
        self.body, self.mu, self.samples, self.seed, self.order = K, mu, samples, seed, order
        if samples is not None:
            rng = np.random.default_rng(seed)
            lo, hi = K.bounding_box
            pts = rng.uniform(lo, hi, size=(samples, K.dimension))
            self._pts = pts[K.contains(pts)]
            self._wts = mu.density(self._pts) * float(np.prod(hi - lo)) / samples
        self._dk = difference_body(K)
        super().__init__(K.dimension, float(self._eval(np.zeros((1, K.dimension)))[0]),
                         support_hint=self._dk)

    def _eval(self, X):
        K = self.body
        out = np.empty(len(X))
        for i, x in enumerate(X):
            if self.samples is not None:
                out[i] = self._wts[K.contains(self._pts - x)].sum()
                continue
            offs = K.offsets + np.minimum(0.0, K.normals @ x)
            if K.dimension == 2:
                pts = clipped_polygon(K, offs)
            else:
                pts = K.vertices
                for a, b, b0 in zip(K.normals, offs, K.offsets):
                    if b < b0:
                        pts = clip_points(pts, a, b)
            if len(pts) <= K.dimension:
                out[i] = 0.0
                continue
            out[i] = _integrate_over_hull(self.mu.density, pts, self.order)
        return out


class _GridIntegrator:
    """Tensor Gauss–Legendre rule on a box covering the support of f."""

    def __init__(self, f: LogConcaveFn, nodes: int, panels: int | None = None,
                 tail: float = 1e-12):
        lo, hi = f.integration_box(tail)
        panels = panels or max(1, nodes // 8)
        x, w = np.polynomial.legendre.leggauss(max(1, nodes // panels))
        edges = [np.linspace(l, h, panels + 1) for l, h in zip(lo, hi)]
        axes = []
        for e in edges:
            mid, half = (e[1:] + e[:-1]) / 2, (e[1:] - e[:-1]) / 2
            axes.append(((mid[:, None] + half[:, None] * x).ravel(),
                         (half[:, None] * w).ravel()))
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
        self.points = np.column_stack([g.ravel() for g in grids])
        self.weights = np.prod(np.column_stack([g.ravel() for g in wgrids]), axis=1)


class FunctionCovariogramFn(LogConcaveFn):
    """L2 (C_f(x) = ∫ f(y) f(x+y) dy) or L1 (∫ min(f(y), f(x+y)) dy) covariogram.

    With ``m > 1`` the L1 form takes points of (R^n)^m: ∫ min(f(y), f(y+x_1), ...).
    Indicators of bodies reduce exactly to the classical covariogram.
    """

    def __init__(self, f: LogConcaveFn, kind: str = "l2", m: int = 1, nodes: int | None = None):
        if kind not in ("l1", "l2"):
            raise FunctionError(f"unknown function covariogram kind {kind!r}")
        if kind == "l2" and m != 1:
            raise FunctionError("the L2 covariogram takes one argument")
        self.f, self.kind, self.m, self.nodes = f, kind, m, nodes
        self.family = f"{kind}-covariogram"
        self._exact = None
        if isinstance(f, Indicator) and f.body is not None:
            self._exact = f.body
        else:
            nodes = nodes or {1: 1024, 2: 128}.get(f.dimension, 32)
            self._grid = _GridIntegrator(f, nodes)
            self._fy = f(self._grid.points)
        n = f.dimension * m
        if self._exact is not None:
            origin = volume(self._exact)
        else:
            origin = float(np.dot(self._grid.weights, self._fy ** (2 if kind == "l2" else 1)))
        hint = difference_body(f.support_hint) if (m == 1 and isinstance(f.support_hint, ConvexBody)) else None
        super().__init__(n, origin, support_hint=hint if hint is not None else
                         (ALL_SPACE if f.support_hint == ALL_SPACE else None))

    def _eval(self, X):
        n = self.f.dimension
        out = np.empty(len(X))
        for i, x in enumerate(X):
            xs = x.reshape(self.m, n)
            if self._exact is not None:
                if self.m == 1:
                    out[i] = covariogram(self._exact, xs[0])
                else:
                    out[i] = multi_covariogram(self._exact, xs)
                continue
            if self.kind == "l2":
                out[i] = np.dot(self._grid.weights, self._fy * self.f(self._grid.points + xs[0]))
            else:
                v = self._fy
                for xj in xs:
                    v = np.minimum(v, self.f(self._grid.points + xj))
                out[i] = np.dot(self._grid.weights, v)
        return out


class MultiCovariogramFn(LogConcaveFn):
    """(x_1, ..., x_m) -> Vol(K ∩ (K + x_1) ∩ ... ∩ (K + x_m)) on R^{nm}."""

    family = "m-order-covariogram"

    def __init__(self, K: ConvexBody, m: int, mode: str = "exact", samples: int = 200_000,
                 seed: int = 0):
        if m < 1:
            raise FunctionError("m must be at least 1")
        if mode == "exact" and K.dimension * m > 6:
            raise GeometryError("n*m > 6 in exact mode: use monte-carlo mode")
        self.body, self.m, self.mode, self.samples, self.seed = K, m, mode, samples, seed
        super().__init__(K.dimension * m, volume(K) if mode == "exact" else
                         multi_covariogram(K, np.zeros((m, K.dimension)), "monte-carlo",
                                           samples, seed).value)

    def _eval(self, X):
        n = self.body.dimension
        out = np.empty(len(X))
        for i, x in enumerate(X):
            v = multi_covariogram(self.body, x.reshape(self.m, n), self.mode, self.samples,
                                  self.seed)
            out[i] = v if self.mode == "exact" else v.value
        return out


def generalized_covariogram(kind: str, **args) -> LogConcaveFn:
    """Factory over the covariogram kinds.

    classical(body[, samples, seed]); weighted(body, measure[, samples, seed]);
    l1(function) / l2(function); m-order(body, m[, mode]); l1-m-order(function, m).
    """
    if kind == "classical":
        return CovariogramFn(args["body"], args.get("samples"), args.get("seed", 0))
    if kind == "weighted":
        mu = args["measure"]
        if isinstance(mu, LogConcaveFn):
            mu = Measure(mu)
        return WeightedCovariogramFn(args["body"], mu, args.get("samples"), args.get("seed", 0))
    if kind in ("l1", "l2"):
        return FunctionCovariogramFn(args["function"], kind, 1, args.get("nodes"))
    if kind == "m-order":
        return MultiCovariogramFn(args["body"], args["m"], args.get("mode", "exact"),
                                  args.get("samples", 200_000), args.get("seed", 0))
    if kind == "l1-m-order":
        return FunctionCovariogramFn(args["function"], "l1", args["m"], args.get("nodes"))
    raise FunctionError(f"unknown covariogram kind {kind!r}; expected one of {KINDS}")
