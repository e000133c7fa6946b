"""Smooth log-concave functions on the quadrant with their second partials."""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr

from ..logconcave.functions import FunctionError, LogConcaveFn

PARTIALS = ("f", "f_r", "f_s", "f_rr", "f_ss", "f_rs")


class Smooth2DFn(LogConcaveFn):
    """f(r, s) on [0, inf)^2, maximal at (0, 0), with first and second partials.

    ``fn(r, s)`` must be smooth on a neighbourhood of the closed quadrant;
    partials missing from ``partials`` come from central differences with
    step ``h = 1e-5 * scale``.
    """

    family = "smooth2d"

    def __init__(self, fn, partials: dict | None = None, scale: float = 1.0, label: str = ""):
        self.fn = fn
        self.scale = float(scale)
        self.h = 1e-5 * self.scale
        self.label = label or "smooth2d"
        self.analytic = dict(partials or {})
        unknown = set(self.analytic) - set(PARTIALS)
        if unknown:
            raise FunctionError(f"unknown partials {sorted(unknown)}")
        super().__init__(2, float(fn(np.zeros(1), np.zeros(1))[0]), origin_interior=False)

    def _eval(self, X):
        r, s = X[:, 0], X[:, 1]
        inside = (r >= 0) & (s >= 0)
        out = np.zeros(len(X))
        out[inside] = self.fn(r[inside], s[inside])
        return out

    def partial(self, name: str, r, s) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        s = np.broadcast_to(np.asarray(s, dtype=float), r.shape)
        if name in self.analytic:
            return self.analytic[name](r, s)
        f, h = self.fn, self.h
        if name == "f":
            return f(r, s)
        if name == "f_r":
            return (f(r + h, s) - f(r - h, s)) / (2 * h)
        if name == "f_s":
            return (f(r, s + h) - f(r, s - h)) / (2 * h)
        if name == "f_rr":
            return (f(r + h, s) - 2 * f(r, s) + f(r - h, s)) / h ** 2
        if name == "f_ss":
            return (f(r, s + h) - 2 * f(r, s) + f(r, s - h)) / h ** 2
        if name == "f_rs":
            return (f(r + h, s + h) - f(r + h, s - h) - f(r - h, s + h) + f(r - h, s - h)) / (4 * h * h)
        raise FunctionError(f"unknown partial {name!r}")

    def fd_error(self, name: str, r, s) -> np.ndarray:
        """Error bound of a numerical partial: |D(h) - D(2h)| plus rounding; 0 if analytic."""
        r = np.asarray(r, dtype=float)
        if name in self.analytic or name == "f":
            return np.zeros_like(r)
        d1 = self.partial(name, r, s)
        h = self.h
        self.h = 2 * h
        try:
            d2 = self.partial(name, r, s)
        finally:
            self.h = h
        order = 1 if name in ("f_r", "f_s") else 2
        noise = 8 * np.finfo(float).eps * np.abs(self.fn(r, np.broadcast_to(s, r.shape))) / h ** order
        return np.abs(d1 - d2) + noise

    def decay_radius(self, rel: float = 1e-18) -> float:
        """A radius beyond which f(r, 0) < rel * f(0, 0), by doubling."""
        R = self.scale
        f0 = self.origin_value
        while self.fn(np.array([R]), np.zeros(1))[0] >= rel * f0:
            R *= 2
            if R > 1e8:
                raise FunctionError("f(r, 0) does not decay")
        return R

    def to_spec(self):
        return {"smooth2d": self.label}


def quadratic_exponential_2d(alpha: float, beta: float, lam: float = 0.0, a: float = 0.0,
                             b: float = 0.0, weight: float = 1.0) -> Smooth2DFn:
    """weight * exp(-(alpha r^2 + beta s^2 + lam r s + a r + b s)), analytic partials."""
    if not (alpha > 0 and beta > 0 and 4 * alpha * beta > lam * lam):
        raise FunctionError("the quadratic part must be positive definite")
    if a < 0 or b < 0:
        raise FunctionError("a, b >= 0 are needed for the maximum at the corner")

    def Q(r, s):
        return alpha * r * r + beta * s * s + lam * r * s + a * r + b * s

    def f(r, s):
        return weight * np.exp(-Q(r, s))

    Qr = lambda r, s: 2 * alpha * r + lam * s + a
    Qs = lambda r, s: 2 * beta * s + lam * r + b
    partials = {
        "f": f,
        "f_r": lambda r, s: -Qr(r, s) * f(r, s),
        "f_s": lambda r, s: -Qs(r, s) * f(r, s),
        "f_rr": lambda r, s: (Qr(r, s) ** 2 - 2 * alpha) * f(r, s),
        "f_ss": lambda r, s: (Qs(r, s) ** 2 - 2 * beta) * f(r, s),
        "f_rs": lambda r, s: (Qr(r, s) * Qs(r, s) - lam) * f(r, s),
    }
    scale = 1.0 / np.sqrt(min(alpha, beta))
    label = f"qe(alpha={alpha:.6g}, beta={beta:.6g}, lambda={lam:.6g}, a={a:.6g}, b={b:.6g})"
    return Smooth2DFn(f, partials, scale=float(scale), label=label)


def random_quadratic_exponential(rng: np.random.Generator) -> Smooth2DFn:
    alpha, beta = rng.uniform(0.3, 3.0, size=2)
    lam = rng.uniform(-0.95, 0.95) * 2 * np.sqrt(alpha * beta)
    a, b = rng.uniform(0.0, 1.0, size=2) * (rng.random(2) < 0.5)
    return quadratic_exponential_2d(alpha, beta, lam, a, b)


def smoothed_box(width: float = 1.0, sigma: float = 0.25) -> Smooth2DFn:
    """Product of Gaussian-smoothed indicators of [-width, width] (numerical partials)."""
    def one(t):
        return ndtr((width - t) / sigma) - ndtr((-width - t) / sigma)

    return Smooth2DFn(lambda r, s: one(r) * one(s), scale=width,
                      label=f"smoothed box(width={width:g}, sigma={sigma:g})")


def smooth2d_from_spec(spec: dict) -> Smooth2DFn:
    spec = dict(spec)
    kind = spec.pop("kind", "quadratic-exponential")
    if kind == "quadratic-exponential":
        return quadratic_exponential_2d(spec.pop("alpha"), spec.pop("beta"), spec.pop("lambda", 0.0),
                                        spec.pop("a", 0.0), spec.pop("b", 0.0),
                                        spec.pop("weight", 1.0))
    if kind == "smoothed-box":
        return smoothed_box(spec.get("width", 1.0), spec.get("sigma", 0.25))
    raise FunctionError(f"unknown smooth2d kind {kind!r}")
