"""Halfspace clipping of convex polytopes.

Polygons are clipped edge by edge (Sutherland–Hodgman).  In higher
dimensions a polytope is kept as a point cloud whose hull is the body; a
cut keeps the points on the inner side and adds every crossing of a
segment joining an inner point to an outer one.  Those crossings all lie in
the clipped body and include its new vertices, so the hull stays exact.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .bodies import ConvexBody, polytope_volume


def clip_polygon(poly: np.ndarray, a: np.ndarray, b: float) -> np.ndarray:
    """Clip an ordered convex polygon by {y : <a, y> <= b}."""
    if len(poly) == 0:
        return poly
    d = poly @ a - b
    inside = d <= 0
    if inside.all():
        return poly
    if not inside.any():
        return poly[:0]
    out = []
    k = len(poly)
    for i in range(k):
        j = (i + 1) % k
        if inside[i]:
            out.append(poly[i])
        if inside[i] != inside[j]:
            t = d[i] / (d[i] - d[j])
            out.append(poly[i] + t * (poly[j] - poly[i]))
    return np.array(out)


def polygon_area(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def clip_points(points: np.ndarray, a: np.ndarray, b: float) -> np.ndarray:
    """Point cloud whose hull is conv(points) ∩ {<a, y> <= b}."""
    d = points @ a - b
    inner, outer = points[d <= 0], points[d > 0]
    if len(outer) == 0 or len(inner) == 0:
        return inner
    di, do = d[d <= 0], d[d > 0]
    t = di[:, None] / (di[:, None] - do[None, :])
    cross = inner[:, None, :] + t[..., None] * (outer[None, :, :] - inner[:, None, :])
    pts = np.vstack([inner, cross.reshape(-1, points.shape[1])])
    return _hull_vertices(pts)


def _hull_vertices(pts: np.ndarray) -> np.ndarray:
    if len(pts) <= pts.shape[1] + 1:
        return pts
    try:
        return pts[ConvexHull(pts).vertices]
    except QhullError:
        return pts


def polygon_width(poly: np.ndarray) -> float:
    """Minimal width of a convex polygon (over its edge normals)."""
    if len(poly) < 3:
        return 0.0
    e = np.roll(poly, -1, axis=0) - poly
    nrm = np.linalg.norm(e, axis=1)
    ok = nrm > 0
    if not ok.any():
        return 0.0
    normals = np.column_stack([-e[ok, 1], e[ok, 0]]) / nrm[ok, None]
    proj = poly @ normals.T
    return float((proj.max(0) - proj.min(0)).min())


def clipped_polygon(K: ConvexBody, offsets: np.ndarray) -> np.ndarray:
    """Ordered vertices of a planar K cut down to the given offsets."""
    cut = offsets < K.offsets - 1e-15 * max(1.0, K.diameter)
    c = K.vertices.mean(0)
    ang = np.arctan2(*(K.vertices - c).T[::-1])
    poly = K.vertices[np.argsort(ang)]
    for a, b in zip(K.normals[cut], offsets[cut]):
        poly = clip_polygon(poly, a, b)
        if len(poly) < 3:
            return poly[:0]
    return poly


def clipped_volume(K: ConvexBody, offsets: np.ndarray) -> float:
    """Vol{y : <a_i, y> <= offsets_i} for offsets no larger than K's.

    The result is the volume of K cut down by the facets whose offsets were
    lowered; untouched facets cost nothing.
    """
    n = K.dimension
    cut = offsets < K.offsets - 1e-15 * max(1.0, K.diameter)
    if n == 1:
        lo = -offsets[K.normals[:, 0] < 0].min()
        hi = offsets[K.normals[:, 0] > 0].min()
        return max(0.0, hi - lo)
    if n == 2:
        return polygon_area(clipped_polygon(K, offsets))
    pts = K.vertices
    for a, b in zip(K.normals[cut], offsets[cut]):
        pts = clip_points(pts, a, b)
        if len(pts) <= n:
            return 0.0
    if n <= 3:
        return polytope_volume(pts)
    try:
        return float(ConvexHull(pts).volume)
    except QhullError:
        return 0.0
