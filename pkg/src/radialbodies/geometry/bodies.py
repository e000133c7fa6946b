"""Convex bodies and their elementary functionals.

A :class:`ConvexBody` is immutable once built.  Polytopes carry both a
vertex and a halfspace description; balls and axis boxes keep their closed
forms so volumes and covariograms stay exact in any dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError
from scipy.special import gamma

POLYTOPE = "polytope"
BALL = "ball"
BOX = "box"


class GeometryError(ValueError):
    """Invalid or degenerate geometric input."""


class MCEstimate(NamedTuple):
    value: float
    stderr: float


@dataclass(frozen=True)
class HalfSpace:
    """The set {y : <normal, y> <= offset} with a unit normal."""

    normal: tuple
    offset: float

    def __post_init__(self):
        norm = math.sqrt(sum(c * c for c in self.normal))
        if abs(norm - 1.0) > 1e-12:
            raise GeometryError(f"halfspace normal must be unit, got |n| = {norm!r}")


def ball_volume(n: int, radius: float = 1.0) -> float:
    """Volume of the n-dimensional Euclidean ball (n = 0 gives 1)."""
    return math.pi ** (n / 2) / gamma(n / 2 + 1) * radius**n


def _dedupe_planes(normals, offsets, tol=1e-10):
    keep_n, keep_b = [], []
    for a, b in zip(normals, offsets):
        for a2, b2 in zip(keep_n, keep_b):
            if np.abs(a - a2).max() < tol and abs(b - b2) < tol * max(1.0, abs(b)):
                break
        else:
            keep_n.append(a)
            keep_b.append(b)
    return np.array(keep_n), np.array(keep_b)


class ConvexBody:
    """A convex body in R^n: polytope, Euclidean ball or axis-aligned box.

    Use the module-level constructors (:func:`polytope`, :func:`ball`, ...)
    rather than calling this class directly.
    """

    def __init__(self, kind, dimension, *, vertices=None, normals=None,
                 offsets=None, center=None, radius=None, lo=None, hi=None):
        self.kind = kind
        self.dimension = int(dimension)
        self.vertices = vertices
        self.normals = normals
        self.offsets = offsets
        self.center = center
        self.radius = radius
        self.lo = lo
        self.hi = hi
        for arr in (vertices, normals, offsets, center, lo, hi):
            if arr is not None:
                arr.setflags(write=False)

    def __repr__(self):
        if self.kind == BALL:
            return f"ConvexBody(ball, center={self.center.tolist()}, radius={self.radius})"
        if self.kind == BOX:
            return f"ConvexBody(box, lo={self.lo.tolist()}, hi={self.hi.tolist()})"
        return f"ConvexBody(polytope, n={self.dimension}, {len(self.vertices)} vertices)"

    @property
    def is_polytope(self) -> bool:
        return self.kind in (POLYTOPE, BOX)

    @property
    def is_simplex(self) -> bool:
        return self.kind == POLYTOPE and len(self.vertices) == self.dimension + 1

    @cached_property
    def diameter(self) -> float:
        if self.kind == BALL:
            return 2.0 * self.radius
        if self.kind == BOX:
            return float(np.linalg.norm(self.hi - self.lo))
        v = self.vertices
        d = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((d * d).sum(-1)).max())

    @cached_property
    def bounding_box(self):
        if self.kind == BALL:
            return self.center - self.radius, self.center + self.radius
        if self.kind == BOX:
            return self.lo.copy(), self.hi.copy()
        return self.vertices.min(0), self.vertices.max(0)

    @cached_property
    def facet_areas(self) -> np.ndarray:
        """(n-1)-volume of each facet, aligned with ``normals``."""
        if not self.is_polytope:
            raise GeometryError("facet areas are defined for polytopes only")
        n = self.dimension
        if n == 1:
            return np.ones(2)
        if self.kind == BOX:
            w = self.hi - self.lo
            full = np.prod(w)
            return np.concatenate([full / w, full / w])
        areas = np.zeros(len(self.normals))
        for i, (a, b) in enumerate(zip(self.normals, self.offsets)):
            on = np.abs(self.vertices @ a - b) <= 1e-9 * max(1.0, self.diameter)
            pts = self.vertices[on]
            if n == 2:
                proj = pts @ np.array([-a[1], a[0]])
                areas[i] = proj.max() - proj.min()
                continue
            basis = np.linalg.svd(np.eye(n) - np.outer(a, a))[0][:, : n - 1]
            local = pts @ basis
            try:
                areas[i] = ConvexHull(local).volume
            except QhullError:
                areas[i] = 0.0
        return areas

    @cached_property
    def interior_point(self) -> np.ndarray:
        if self.kind == BALL:
            return self.center.copy()
        if self.kind == BOX:
            return (self.lo + self.hi) / 2
        return self.vertices.mean(0)

    def contains(self, X, tol: float = 0.0) -> np.ndarray:
        """Membership test for points of shape (..., n)."""
        X = np.asarray(X, dtype=float)
        if self.kind == BALL:
            d = np.linalg.norm(X - self.center, axis=-1)
            return d <= self.radius + tol
        if self.kind == BOX:
            return np.all((X >= self.lo - tol) & (X <= self.hi + tol), axis=-1)
        return np.all(X @ self.normals.T <= self.offsets + tol, axis=-1)

    def translate(self, t) -> "ConvexBody":
        t = np.asarray(t, dtype=float)
        if self.kind == BALL:
            return ball(self.center + t, self.radius)
        if self.kind == BOX:
            return box(self.lo + t, self.hi + t)
        return polytope(self.vertices + t)

    def reflect(self) -> "ConvexBody":
        """The body -K."""
        if self.kind == BALL:
            return ball(-self.center, self.radius)
        if self.kind == BOX:
            return box(-self.hi, -self.lo)
        return polytope(-self.vertices)

    def to_spec(self) -> dict:
        if self.kind == BALL:
            return {"type": "ball", "center": self.center.tolist(), "radius": float(self.radius)}
        if self.kind == BOX:
            return {"type": "box", "min": self.lo.tolist(), "max": self.hi.tolist()}
        return {"type": "polytope", "vertices": self.vertices.tolist()}


# ---------------------------------------------------------------- constructors


def polytope(vertices) -> ConvexBody:
    """Convex hull of a finite point set with non-empty interior."""
    pts = np.atleast_2d(np.asarray(vertices, dtype=float))
    if pts.ndim != 2:
        raise GeometryError("vertices must be a list of points")
    n = pts.shape[1]
    if len(pts) < n + 1 or np.linalg.matrix_rank(pts[1:] - pts[0], tol=1e-12) < n:
        raise GeometryError("polytope needs n+1 affinely independent vertices (empty interior)")
    if n == 1:
        a, b = float(pts.min()), float(pts.max())
        return ConvexBody(POLYTOPE, 1, vertices=np.array([[a], [b]]),
                          normals=np.array([[-1.0], [1.0]]), offsets=np.array([-a, b]))
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise GeometryError(f"degenerate polytope: {exc}") from exc
    verts = pts[hull.vertices]
    normals = hull.equations[:, :-1]
    offsets = -hull.equations[:, -1]
    normals, offsets = _dedupe_planes(normals, offsets)
    normals = normals / np.linalg.norm(normals, axis=1, keepdims=True)
    return ConvexBody(POLYTOPE, n, vertices=verts, normals=normals, offsets=offsets)


def halfspace_polytope(normals, offsets) -> ConvexBody:
    """Polytope {y : <a_i, y> <= b_i}; normals are normalised here."""
    A = np.atleast_2d(np.asarray(normals, dtype=float))
    b = np.asarray(offsets, dtype=float).ravel()
    norms = np.linalg.norm(A, axis=1)
    if np.any(norms == 0):
        raise GeometryError("zero halfspace normal")
    A, b = A / norms[:, None], b / norms
    n = A.shape[1]
    for i in range(n):
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[i] = -sign
            res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs")
            if res.status == 3:
                raise GeometryError("unbounded body")
            if res.status == 2:
                raise GeometryError("empty body: halfspaces are infeasible")
    # Chebyshev centre gives a strictly interior point for the intersection.
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.hstack([A, np.ones((len(A), 1))]), b_ub=b,
                  bounds=[(None, None)] * n + [(0, None)], method="highs")
    if res.status != 0 or res.x[-1] <= 1e-12:
        raise GeometryError("halfspace polytope has empty interior")
    if n == 1:
        upper = b[A[:, 0] > 0] / A[A[:, 0] > 0, 0]
        lower = b[A[:, 0] < 0] / A[A[:, 0] < 0, 0]
        return polytope([[lower.max()], [upper.min()]])
    hs = HalfspaceIntersection(np.hstack([A, -b[:, None]]), res.x[:-1])
    return polytope(hs.intersections)


def ball(center, radius: float) -> ConvexBody:
    c = np.atleast_1d(np.asarray(center, dtype=float))
    if not radius > 0:
        raise GeometryError("ball radius must be positive")
    return ConvexBody(BALL, len(c), center=c, radius=float(radius))


def box(lo, hi) -> ConvexBody:
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    if lo.shape != hi.shape or np.any(hi <= lo):
        raise GeometryError("box needs min < max in every coordinate")
    n = len(lo)
    corners = np.array(np.meshgrid(*[[l, h] for l, h in zip(lo, hi)], indexing="ij"))
    verts = corners.reshape(n, -1).T
    eye = np.eye(n)
    return ConvexBody(BOX, n, vertices=verts, normals=np.vstack([-eye, eye]),
                      offsets=np.concatenate([-lo, hi]), lo=lo, hi=hi)


def interval(a: float, b: float) -> ConvexBody:
    return polytope([[a], [b]])


def body_from_spec(spec: dict) -> ConvexBody:
    """Build a body from its JSON description.

    Recognised ``type`` values: polytope, halfspace, ball, box, interval and
    random-polygon (vertices, seed, radius, jitter).
    """
    kind = spec.get("type")
    if kind == "random-polygon":
        rng = np.random.default_rng(spec.get("seed", 0))
        return random_polygon(rng, spec.get("vertices", 6), spec.get("radius", 1.0),
                              spec.get("jitter", 0.3))
    if kind == "polytope":
        if "vertices" in spec:
            return polytope(spec["vertices"])
        return halfspace_polytope(spec["normals"], spec["offsets"])
    if kind == "halfspace":
        return halfspace_polytope(spec["normals"], spec["offsets"])
    if kind == "ball":
        return ball(spec["center"], spec["radius"])
    if kind == "box":
        return box(spec["min"], spec["max"])
    if kind == "interval":
        return interval(*spec["bounds"])
    raise GeometryError(f"unknown body type {kind!r}")


# ------------------------------------------------------------------ functionals


def support_function(K: ConvexBody, theta) -> np.ndarray:
    """h_K(theta) = max_{y in K} <y, theta>, vectorised over (..., n)."""
    T = np.asarray(theta, dtype=float)
    if K.kind == BALL:
        return T @ K.center + K.radius * np.linalg.norm(T, axis=-1)
    return (T @ K.vertices.T).max(-1)


def minkowski_functional(K: ConvexBody, x) -> np.ndarray | float:
    """inf{t > 0 : x in tK}, with +inf when no dilate of K contains x."""
    X = np.asarray(x, dtype=float)
    scalar = X.ndim == 1
    X = np.atleast_2d(X)
    if K.kind == BALL:
        c, R = K.center, K.radius
        alpha = c @ c - R * R
        beta = X @ c
        gam = (X * X).sum(-1)
        disc = beta * beta - alpha * gam
        with np.errstate(divide="ignore", invalid="ignore"):
            t = gam / (beta + np.sqrt(np.maximum(disc, 0.0)))
        ok = disc >= 0
        if alpha >= 0:
            ok &= beta > 0
        out = np.where(ok, t, np.inf)
        zero = gam == 0
        out[zero] = 0.0 if alpha <= 0 else np.inf
    else:
        out = polyhedral_gauge(K.normals, K.offsets, X, K.diameter)
    return float(out[0]) if scalar else out


def polyhedral_gauge(A, b, X, scale: float = 1.0) -> np.ndarray:
    """Minkowski functional of {y : A y <= b} (possibly unbounded) at rows of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    tol = 1e-13 * max(1.0, scale)
    ax = X @ A.T
    pos, neg, flat = b > tol, b < -tol, np.abs(b) <= tol
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = np.max(np.where(pos, ax / np.where(pos, b, 1.0), 0.0), axis=-1, initial=0.0)
        upper = np.min(np.where(neg, ax / np.where(neg, b, 1.0), np.inf), axis=-1, initial=np.inf)
    size = np.linalg.norm(X, axis=-1)
    flat_ok = np.all(np.where(flat, ax <= 1e-13 * np.maximum(size, 1.0)[..., None], True), axis=-1)
    feasible = flat_ok & (upper > 0) & (lower <= upper * (1 + 1e-12))
    return np.where(feasible, lower, np.inf)


def volume(K: ConvexBody, method: str = "exact", samples: int = 100_000, seed: int = 0):
    """Lebesgue measure of K.

    ``method="exact"`` returns a float (closed form for balls and boxes,
    triangulation for polytopes of dimension <= 3).  ``method="monte-carlo"``
    returns an :class:`MCEstimate` from hit counting in the bounding box.
    """
    if method == "monte-carlo":
        rng = np.random.default_rng(seed)
        lo, hi = K.bounding_box
        pts = rng.uniform(lo, hi, size=(samples, K.dimension))
        frac = K.contains(pts).mean()
        vol_box = float(np.prod(hi - lo))
        return MCEstimate(vol_box * frac, vol_box * math.sqrt(frac * (1 - frac) / samples))
    if method != "exact":
        raise ValueError(f"unknown volume method {method!r}")
    if K.kind == BALL:
        return ball_volume(K.dimension, K.radius)
    if K.kind == BOX:
        return float(np.prod(K.hi - K.lo))
    if K.is_simplex:
        edges = K.vertices[1:] - K.vertices[0]
        return float(abs(np.linalg.det(edges)) / math.factorial(K.dimension))
    return polytope_volume(K.vertices)


def polytope_volume(points) -> float:
    """Volume of conv(points); 2D by the shoelace fan, 3D by hull tetrahedra."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[1]
    if n > 3:
        raise GeometryError("exact volume needs dimension <= 3; use method='monte-carlo'")
    if len(pts) < n + 1:
        return 0.0
    if n == 1:
        return float(pts.max() - pts.min())
    try:
        hull = ConvexHull(pts)
    except QhullError:
        return 0.0
    if n == 2:
        v = pts[hull.vertices]
        x, y = v[:, 0], v[:, 1]
        return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    apex = pts[hull.vertices].mean(0)
    tets = pts[hull.simplices] - apex
    return float(np.abs(np.linalg.det(tets)).sum() / 6.0)


def projection_volume(K: ConvexBody, theta) -> float:
    """Vol_{n-1} of the orthogonal projection of K onto theta-perp."""
    th = np.asarray(theta, dtype=float)
    if abs(np.linalg.norm(th) - 1.0) > 1e-9:
        raise GeometryError("projection direction must be a unit vector")
    n = K.dimension
    if n == 1:
        return 1.0
    if K.kind == BALL:
        return ball_volume(n - 1, K.radius)
    if K.kind == BOX:
        w = K.hi - K.lo
        return float(sum(abs(th[i]) * np.prod(np.delete(w, i)) for i in range(n)))
    if n == 2:
        perp = np.array([-th[1], th[0]])
        s = K.vertices @ perp
        return float(s.max() - s.min())
    basis = np.linalg.svd(np.eye(n) - np.outer(th, th))[0][:, : n - 1]
    local = K.vertices @ basis
    if n - 1 <= 3:
        return polytope_volume(local)
    return float(ConvexHull(local).volume)


def projection_volume_cauchy(K: ConvexBody, theta) -> float:
    """Cauchy's projection formula: half the facet areas weighted by |<a_i, theta>|."""
    th = np.asarray(theta, dtype=float)
    return float(0.5 * np.sum(K.facet_areas * np.abs(K.normals @ th)))


def polar_projection_gauge(K: ConvexBody, x) -> float:
    """|x| times the shadow volume of K in direction x; 0 at the origin."""
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r == 0.0:
        return 0.0
    return r * projection_volume(K, x / r)


# ------------------------------------------------------------------- sampling


def sample_points(K: ConvexBody, rng: np.random.Generator, size: int,
                  max_tries: int = 1000) -> np.ndarray:
    """Uniform points of K by rejection from its bounding box."""
    lo, hi = K.bounding_box
    out = np.empty((0, K.dimension))
    tries = 0
    while len(out) < size:
        if tries >= max_tries:
            raise GeometryError("degenerate body: rejection sampling failed")
        need = size - len(out)
        batch = rng.uniform(lo, hi, size=(max(2 * need, 64), K.dimension))
        out = np.vstack([out, batch[K.contains(batch)]])
        tries += 1
    return out[:size]


def sample_point(K: ConvexBody, rng: np.random.Generator, max_tries: int = 10_000) -> np.ndarray:
    lo, hi = K.bounding_box
    for _ in range(max_tries):
        y = rng.uniform(lo, hi)
        if K.contains(y):
            return y
    raise GeometryError("degenerate body: rejection sampling failed")


def acceptance_rate(K: ConvexBody, rng: np.random.Generator, samples: int = 10_000) -> float:
    lo, hi = K.bounding_box
    return float(K.contains(rng.uniform(lo, hi, size=(samples, K.dimension))).mean())


def random_polygon(rng: np.random.Generator, n_vertices: int, radius: float = 1.0,
                   jitter: float = 0.3) -> ConvexBody:
    """Convex polygon with exactly ``n_vertices`` vertices around the origin."""
    for _ in range(1000):
        ang = np.sort(rng.uniform(0, 2 * np.pi, n_vertices))
        if np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]])).max() >= np.pi * 0.9:
            continue
        rad = radius * (1 + jitter * rng.uniform(-1, 1, n_vertices))
        pts = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        K = polytope(pts)
        if len(K.vertices) == n_vertices and np.all(K.offsets > 0.05 * radius):
            return K
    raise GeometryError("could not draw a random polygon")
