"""Gaussian mollification with recentring at the maximiser.

g_k(x) = (g * gamma_k)(x + x(k)), gamma_k the centred Gaussian density with
variance 2/k per coordinate, x(k) a maximiser of g * gamma_k.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from ..geometry import ConvexBody
from .functions import (ALL_SPACE, FunctionError, Gaussian, Indicator, LogConcaveFn,
                        Product, QuadraticExponential)

GOLDEN = (math.sqrt(5) - 1) / 2
METHODS = ("auto", "closed", "hermite", "support", "monte-carlo")


class MollifyError(RuntimeError):
    def __init__(self, message, best):
        super().__init__(f"{message}; best iterate {np.asarray(best).tolist()}")
        self.best = best


def unique_max(g: LogConcaveFn, j: float = 1e6) -> LogConcaveFn:
    """e^{-|x|^2 / j} g, which has a unique maximiser."""
    if isinstance(g, Gaussian):
        P = g.precision + (2.0 / j) * np.eye(g.dimension)
        return Gaussian(np.linalg.inv(P), scale=g.scale)
    return Product([g, QuadraticExponential(np.eye(g.dimension) / j)])


def _box_of(g: LogConcaveFn):
    if isinstance(g, Indicator) and g.body is not None and g.body.kind == "box":
        return g.body
    return None


class _Convolver:
    """Evaluate z -> (g * gamma)(z) for gamma = N(0, var I)."""

    def __init__(self, g: LogConcaveFn, var: float, method: str, nodes: int,
                 samples: int, seed: int):
        self.g, self.var, self.sigma = g, var, math.sqrt(var)
        n = g.dimension
        if method == "auto":
            if isinstance(g, Gaussian) or _box_of(g) is not None:
                method = "closed"
            elif n >= 3:
                method = "monte-carlo"
            else:
                method = "support" if _has_box(g) else "hermite"
        self.method = method
        if method == "closed":
            if isinstance(g, Gaussian):
                C = g.covariance + var * np.eye(n)
                self._prec = np.linalg.inv(C)
                self._amp = g.scale * math.sqrt(np.linalg.det(g.covariance) / np.linalg.det(C))
            elif _box_of(g) is None:
                raise FunctionError("closed-form mollification needs a Gaussian or a box indicator")
        elif method == "hermite":
            t, w = np.polynomial.hermite.hermgauss(nodes)
            grids = np.meshgrid(*([t] * n), indexing="ij")
            wg = np.meshgrid(*([w] * n), indexing="ij")
            self._offsets = math.sqrt(2 * var) * np.column_stack([x.ravel() for x in grids])
            self._weights = np.prod(np.column_stack([x.ravel() for x in wg]), axis=1) / math.pi ** (n / 2)
        elif method == "support":
            lo, hi = g.integration_box()
            x, w = np.polynomial.legendre.leggauss(8)
            axes = []
            for l, h in zip(lo, hi):
                panels = max(2, int(math.ceil((h - l) / self.sigma)))
                panels += panels % 2  # symmetric boxes keep a panel edge at 0
                e = np.linspace(l, h, panels + 1)
                mid, half = (e[1:] + e[:-1]) / 2, (e[1:] - e[:-1]) / 2
                axes.append(((mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()))
            grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
            wg = np.meshgrid(*[a[1] for a in axes], indexing="ij")
            self._points = np.column_stack([x.ravel() for x in grids])
            wts = np.prod(np.column_stack([x.ravel() for x in wg]), axis=1)
            gy = g(self._points)
            keep = gy > 0
            self._points, self._gw = self._points[keep], (wts * gy)[keep]
        elif method == "monte-carlo":
            rng = np.random.default_rng(seed)
            half = rng.standard_normal((samples // 2, n)) * self.sigma
            self._offsets = np.vstack([half, -half])  # antithetic pairs
            self._weights = np.full(len(self._offsets), 1.0 / len(self._offsets))
        else:
            raise FunctionError(f"unknown mollification method {method!r}")

    def __call__(self, Z: np.ndarray) -> np.ndarray:
        g, n = self.g, self.g.dimension
        if self.method == "closed":
            if isinstance(g, Gaussian):
                return self._amp * np.exp(-0.5 * np.einsum("ij,jk,ik->i", Z, self._prec, Z))
            K = _box_of(g)
            s = self.sigma
            return np.prod(ndtr((K.hi - Z) / s) - ndtr((K.lo - Z) / s), axis=1)
        out = np.empty(len(Z))
        if self.method == "support":
            norm = (2 * math.pi * self.var) ** (-n / 2)
            for i, z in enumerate(Z):
                d = z - self._points
                out[i] = norm * np.dot(self._gw, np.exp(-0.5 * (d * d).sum(1) / self.var))
            return out
        for i, z in enumerate(Z):
            out[i] = np.dot(self._weights, g(z - self._offsets))
        return out


def _has_box(g: LogConcaveFn) -> bool:
    try:
        g.integration_box()
        return True
    except FunctionError:
        return False


class MollifiedFn(LogConcaveFn):
    """The recentred convolution g_k; positive everywhere."""

    family = "mollified"
    exact_knots = True

    def __init__(self, g: LogConcaveFn, k: int, method: str = "auto", nodes: int = 64,
                 samples: int = 200_000, seed: int = 0, tol: float = 1e-9,
                 max_sweeps: int = 50):
        if k < 1:
            raise FunctionError("k must be a positive integer")
        self.base, self.k = g, int(k)
        self.conv = _Convolver(g, 2.0 / k, method, nodes, samples, seed)
        self.method = self.conv.method
        self.shift = argmax_concave(lambda Z: self.conv(Z), g.dimension,
                                    scale=_scale(g), tol=tol, max_sweeps=max_sweeps)
        origin = float(self.conv(self.shift[None, :])[0])
        super().__init__(g.dimension, origin, support_hint=ALL_SPACE)

    def _eval(self, X):
        return self.conv(X + self.shift)


def _scale(g: LogConcaveFn) -> float:
    if isinstance(g.support_hint, ConvexBody):
        return g.support_hint.diameter
    try:
        lo, hi = g.integration_box(1e-6)
        return float(np.max(hi - lo))
    except FunctionError:
        return 1.0


def _golden(f, a: float, b: float, tol: float):
    """Maximise a unimodal function on [a, b]; ties prefer the left point."""
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def argmax_concave(F, n: int, scale: float = 1.0, tol: float = 1e-9,
                   max_sweeps: int = 50) -> np.ndarray:
    """Maximiser of a log-concave F by coordinate search with golden sections.

    Works on log F.  Among (near-)maximisers the point closest to the origin
    along the segment [0, x*] is returned.
    """
    def logF(x):
        v = float(F(np.asarray(x, dtype=float)[None, :])[0])
        return math.log(v) if v > 0 else -math.inf

    x = np.zeros(n)
    best = logF(x)
    if not math.isfinite(best):
        raise MollifyError("convolution vanishes at the origin", x)
    step = tol * max(scale, 1.0)
    for _ in range(max_sweeps):
        prev = best
        for i in range(n):
            def along(t, i=i):
                y = x.copy()
                y[i] = t
                return logF(y)
            half = scale
            t, val = _golden(along, x[i] - half, x[i] + half, step)
            if val > best + 1e-15 * abs(best):
                x[i], best = t, val
        if abs(best - prev) <= tol * max(1.0, abs(best)):
            break
    else:
        raise MollifyError("argmax search did not converge", x)
    # Prefer the smallest-norm point of the near-maximal set on [0, x].
    if np.any(x != 0):
        if logF(np.zeros(n)) >= best - tol:
            return np.zeros(n)
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if logF(mid * x) >= best - tol:
                hi = mid
            else:
                lo = mid
        x = hi * x
    return x


def mollify(g: LogConcaveFn, k: int, method: str = "auto", **kw) -> MollifiedFn:
    return MollifiedFn(g, k, method, **kw)
