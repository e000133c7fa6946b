"""Log-concave functions with their maximum at the origin.

Every function evaluates on arrays of points ``(..., n)`` and exposes a ray
interface used by the quadrature engine:

* ``ray_values(thetas, r)`` -- psi_i(r_ij) = g(r_ij theta_i), shapes (m, n), (m, q);
* ``ray_support_end(thetas)`` -- tau_i, the end of {r : g(r theta_i) > 0};
* ``ray_knots(thetas)`` -- interior points where psi may fail to be smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..geometry import ConvexBody, body_from_spec, minkowski_functional
from ..geometry.bodies import polyhedral_gauge

ALL_SPACE = "all-space"


class FunctionError(ValueError):
    """Invalid parameters for a log-concave family."""


def _nan_knots(m: int) -> np.ndarray:
    return np.full((m, 0), np.nan)


class LogConcaveFn:
    """Base class; subclasses implement ``_eval`` on a (N, n) array."""

    family = "custom"
    # True when ray_knots lists every non-smooth point of the ray profiles
    # inside (0, tau), so the quadrature may skip its 0.99-drop search.
    exact_knots = False

    def __init__(self, dimension: int, origin_value: float, *, origin_interior: bool = True,
                 support_hint=None, envelope=None):
        self.dimension = int(dimension)
        self.origin_value = float(origin_value)
        self.origin_interior = bool(origin_interior)
        self.support_hint = support_hint
        self.envelope = envelope
        if not self.origin_value > 0:
            raise FunctionError("g(o) must be positive")

    def __call__(self, x):
        X = np.asarray(x, dtype=float)
        if X.shape[-1] != self.dimension:
            raise FunctionError(f"expected points in R^{self.dimension}")
        flat = X.reshape(-1, self.dimension)
        return self._eval(flat).reshape(X.shape[:-1])

    def _eval(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def ray_values(self, thetas, r) -> np.ndarray:
        T = np.atleast_2d(np.asarray(thetas, dtype=float))
        R = np.asarray(r, dtype=float)
        return self(R[..., None] * T[:, None, :])

    def ray_knots(self, thetas) -> np.ndarray:
        return _nan_knots(len(np.atleast_2d(thetas)))

    def ray_support_end(self, thetas) -> np.ndarray:
        T = np.atleast_2d(np.asarray(thetas, dtype=float))
        hint = self.support_hint
        if hint == ALL_SPACE:
            return np.full(len(T), np.inf)
        if isinstance(hint, ConvexBody):
            with np.errstate(divide="ignore"):
                return 1.0 / minkowski_functional(hint, T)
        return _bisect_support(self, T)

    def integration_box(self, tail: float = 1e-12):
        """A box outside of which g is negligible (below tail * g(o))."""
        if isinstance(self.support_hint, ConvexBody):
            return self.support_hint.bounding_box
        if self.envelope is not None:
            a, c = self.envelope
            R = max(1.0, math.log(max(a, 1.0) / (tail * self.origin_value)) / c)
            return -R * np.ones(self.dimension), R * np.ones(self.dimension)
        raise FunctionError("no bounded support or envelope to integrate over")

    def to_spec(self) -> dict:
        raise FunctionError(f"{type(self).__name__} has no JSON form")

    def __repr__(self):
        return f"{type(self).__name__}(n={self.dimension})"


def _bisect_support(g: LogConcaveFn, T: np.ndarray, r_max: float = 1e6,
                    iterations: int = 80) -> np.ndarray:
    """End of positivity along each ray (inf if still positive at r_max)."""
    hi = np.ones(len(T))
    pos = g.ray_values(T, hi[:, None])[:, 0] > 0
    while pos.any() and hi.max() < r_max:
        hi = np.where(pos, 2 * hi, hi)
        pos = g.ray_values(T, hi[:, None])[:, 0] > 0
    lo = np.where(pos, hi, 0.0)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        v = g.ray_values(T, mid[:, None])[:, 0] > 0
        lo = np.where(v, mid, lo)
        hi = np.where(v, hi, mid)
    return np.where(pos, np.inf, 0.5 * (lo + hi))


# ------------------------------------------------------------------- families


class Gaussian(LogConcaveFn):
    """x -> scale * exp(-x^T C^{-1} x / 2)."""

    family = "gaussian"
    exact_knots = True

    def __init__(self, covariance, dimension: int | None = None, scale: float = 1.0):
        C = np.asarray(covariance, dtype=float)
        if C.ndim == 0:
            if dimension is None:
                raise FunctionError("scalar variance needs a dimension")
            C = float(C) * np.eye(dimension)
        elif C.ndim == 1:
            C = np.diag(C)
        if C.shape[0] != C.shape[1] or not np.allclose(C, C.T):
            raise FunctionError("covariance must be a symmetric matrix")
        ev = np.linalg.eigvalsh(C)
        if ev.min() <= 0:
            raise FunctionError("covariance must be positive definite")
        n = C.shape[0]
        self.covariance = C
        self.precision = np.linalg.inv(C)
        self.scale = float(scale)
        lam = 1.0 / ev.max()
        super().__init__(n, scale, support_hint=ALL_SPACE,
                         envelope=(scale * math.exp(0.5), math.sqrt(lam)))

    def _eval(self, X):
        return self.scale * np.exp(-0.5 * np.einsum("ij,jk,ik->i", X, self.precision, X))

    def ray_values(self, thetas, r):
        T = np.atleast_2d(np.asarray(thetas, dtype=float))
        q = np.einsum("ij,jk,ik->i", T, self.precision, T)
        R = np.asarray(r, dtype=float)
        return self.scale * np.exp(-0.5 * q[:, None] * R * R)

    def to_spec(self):
        return {"family": "gaussian",
                "params": {"covariance": self.covariance.tolist(), "scale": self.scale}}


class ExpNorm(LogConcaveFn):
    """x -> exp(-c |x|)."""

    family = "exp-norm"
    exact_knots = True

    def __init__(self, c: float, dimension: int):
        if not c > 0:
            raise FunctionError("exp-norm rate must be positive")
        self.c = float(c)
        super().__init__(dimension, 1.0, support_hint=ALL_SPACE, envelope=(1.0, self.c))

    def _eval(self, X):
        return np.exp(-self.c * np.linalg.norm(X, axis=1))

    def ray_values(self, thetas, r):
        return np.exp(-self.c * np.asarray(r, dtype=float)) * np.ones((len(np.atleast_2d(thetas)), 1))

    def to_spec(self):
        return {"family": "exp-norm", "params": {"c": self.c, "dimension": self.dimension}}


class QuadraticExponential(LogConcaveFn):
    """x -> exp(-x^T M x) with M symmetric positive semidefinite.

    M must be definite for the function to be integrable; a semidefinite
    M is accepted for use as a factor of a product.
    """

    family = "quadratic-exponential"
    exact_knots = True

    def __init__(self, matrix):
        M = np.atleast_2d(np.asarray(matrix, dtype=float))
        if M.shape[0] != M.shape[1]:
            raise FunctionError("Q must be given by a square matrix")
        M = 0.5 * (M + M.T)
        ev = np.linalg.eigvalsh(M)
        if ev.min() < -1e-12 * max(1.0, abs(ev).max()):
            raise FunctionError("Q is not convex (matrix has a negative eigenvalue)")
        self.matrix = M
        env = (math.exp(0.25), math.sqrt(ev.min())) if ev.min() > 0 else None
        super().__init__(M.shape[0], 1.0, support_hint=ALL_SPACE, envelope=env)

    @classmethod
    def from_coefficients(cls, alpha: float, beta: float, lam: float):
        """Q(r, s) = alpha r^2 + beta s^2 + lam r s."""
        return cls([[alpha, lam / 2], [lam / 2, beta]])

    def _eval(self, X):
        return np.exp(-np.einsum("ij,jk,ik->i", X, self.matrix, X))

    def ray_values(self, thetas, r):
        T = np.atleast_2d(np.asarray(thetas, dtype=float))
        q = np.einsum("ij,jk,ik->i", T, self.matrix, T)
        R = np.asarray(r, dtype=float)
        return np.exp(-q[:, None] * R * R)

    def to_spec(self):
        return {"family": "quadratic-exponential", "params": {"matrix": self.matrix.tolist()}}


class Indicator(LogConcaveFn):
    """Characteristic function of a convex set.

    The set is a :class:`ConvexBody` or a polyhedron {A y <= b} given by
    rows ``normals``/``offsets``, which may be unbounded.
    """

    family = "indicator"
    exact_knots = True

    def __init__(self, body: ConvexBody | None = None, normals=None, offsets=None):
        if body is None:
            if normals is None or offsets is None:
                raise FunctionError("indicator needs a body or halfspaces")
            A = np.atleast_2d(np.asarray(normals, dtype=float))
            b = np.asarray(offsets, dtype=float)
            nrm = np.linalg.norm(A, axis=1)
            self.normals, self.offsets = A / nrm[:, None], b / nrm
            n = A.shape[1]
            if np.any(self.offsets < 0):
                raise FunctionError("the origin must belong to the set (g(o) > 0)")
            interior = bool(np.all(self.offsets > 0))
            hint = None
        else:
            n = body.dimension
            if not body.contains(np.zeros(n), tol=1e-12 * body.diameter):
                raise FunctionError("the origin must belong to the body (g(o) > 0)")
            self.normals = self.offsets = None
            interior = _strictly_inside(body)
            hint = body
        self.body = body
        super().__init__(n, 1.0, origin_interior=interior, support_hint=hint)

    def _gauge(self, X):
        if self.body is not None:
            return minkowski_functional(self.body, X)
        return polyhedral_gauge(self.normals, self.offsets, X)

    def _eval(self, X):
        if self.body is not None:
            return self.body.contains(X).astype(float)
        return np.all(X @ self.normals.T <= self.offsets, axis=1).astype(float)

    def ray_support_end(self, thetas):
        with np.errstate(divide="ignore"):
            return 1.0 / self._gauge(np.atleast_2d(thetas))

    def ray_values(self, thetas, r):
        tau = self.ray_support_end(thetas)
        R = np.asarray(r, dtype=float)
        return (R < tau[:, None]).astype(float)

    def to_spec(self):
        if self.body is not None:
            return {"family": "indicator", "params": {"body": self.body.to_spec()}}
        return {"family": "indicator", "params": {"normals": self.normals.tolist(),
                                                  "offsets": self.offsets.tolist()}}


def _strictly_inside(K: ConvexBody) -> bool:
    if K.kind == "ball":
        return float(np.linalg.norm(K.center)) < K.radius
    return bool(np.all(K.offsets > 1e-12 * K.diameter))


class Product(LogConcaveFn):
    """Pointwise product of log-concave factors."""

    family = "product"

    def __init__(self, factors):
        factors = list(factors)
        if not factors:
            raise FunctionError("product needs at least one factor")
        n = factors[0].dimension
        if any(f.dimension != n for f in factors):
            raise FunctionError("product factors must share a dimension")
        self.factors = factors
        origin = math.prod(f.origin_value for f in factors)
        envs = [f.envelope for f in factors if f.envelope is not None]
        env = None
        if envs:
            a = math.prod(f.envelope[0] if f.envelope else f.origin_value for f in factors)
            env = (a, sum(e[1] for e in envs))
        hints = [f.support_hint for f in factors]
        hint = ALL_SPACE if all(h == ALL_SPACE for h in hints) else None
        self.exact_knots = all(f.exact_knots for f in factors)
        super().__init__(n, origin, origin_interior=all(f.origin_interior for f in factors),
                         support_hint=hint, envelope=env)

    def _eval(self, X):
        out = np.ones(len(X))
        for f in self.factors:
            out = out * f._eval(X)
        return out

    def ray_values(self, thetas, r):
        out = None
        for f in self.factors:
            v = f.ray_values(thetas, r)
            out = v if out is None else out * v
        return out

    def ray_support_end(self, thetas):
        return np.min([f.ray_support_end(thetas) for f in self.factors], axis=0)

    def integration_box(self, tail: float = 1e-12):
        boxes = []
        for f in self.factors:
            try:
                boxes.append(f.integration_box(tail))
            except FunctionError:
                pass
        if not boxes:
            raise FunctionError("no bounded support or envelope to integrate over")
        return np.max([b[0] for b in boxes], axis=0), np.min([b[1] for b in boxes], axis=0)

    def ray_knots(self, thetas):
        ks = [f.ray_knots(thetas) for f in self.factors]
        ends = [f.ray_support_end(thetas)[:, None] for f in self.factors]
        allk = np.concatenate(ks + ends, axis=1)
        tau = self.ray_support_end(thetas)[:, None]
        allk = np.where(allk < tau * (1 - 1e-12), allk, np.nan)
        return np.sort(allk, axis=1)

    def to_spec(self):
        return {"family": "product", "params": {"factors": [f.to_spec() for f in self.factors]}}


def restrict(g: LogConcaveFn, body: ConvexBody | None = None, normals=None,
             offsets=None) -> Product:
    """g times the indicator of a convex set containing o."""
    return Product([g, Indicator(body, normals, offsets)])


class CallableFn(LogConcaveFn):
    """Wrap a vectorised callable; support is found by bisection."""

    def __init__(self, fn: Callable, dimension: int, *, origin_interior: bool = True,
                 support_hint=None, envelope=None):
        self.fn = fn
        origin = float(fn(np.zeros((1, dimension)))[0])
        super().__init__(dimension, origin, origin_interior=origin_interior,
                         support_hint=support_hint, envelope=envelope)

    def _eval(self, X):
        return np.asarray(self.fn(X), dtype=float)


# -------------------------------------------------------------- ray profiles


@dataclass
class RayProfile:
    """psi(r) = g(r theta) for r >= 0, with the end of its support."""

    direction: np.ndarray
    evaluator: Callable = field(repr=False)
    support_end: float
    origin_value: float
    knots: tuple = ()

    def __call__(self, r):
        return self.evaluator(np.asarray(r, dtype=float))

    @classmethod
    def from_callable(cls, fn: Callable, support_end: float = math.inf, knots=()):
        """A standalone profile (direction e1 of the line)."""
        origin = float(np.asarray(fn(np.zeros(1)))[0])
        return cls(np.array([1.0]), fn, float(support_end), origin, tuple(knots))

    def as_function(self) -> LogConcaveFn:
        """The profile as a function on the real line (even extension unused)."""
        return _ProfileFn(self)


class _ProfileFn(LogConcaveFn):
    def __init__(self, prof: RayProfile):
        self.prof = prof
        self.exact_knots = bool(prof.knots) or math.isfinite(prof.support_end)
        super().__init__(1, prof.origin_value, support_hint=None)

    def _eval(self, X):
        return self.prof(np.abs(X[:, 0]))

    def ray_values(self, thetas, r):
        return self.prof(np.asarray(r, dtype=float))

    def ray_support_end(self, thetas):
        return np.full(len(np.atleast_2d(thetas)), self.prof.support_end)

    def ray_knots(self, thetas):
        m = len(np.atleast_2d(thetas))
        k = np.array(self.prof.knots, dtype=float)
        return np.broadcast_to(k, (m, len(k))).copy()


def ray_profile(g: LogConcaveFn, theta) -> RayProfile:
    th = np.asarray(theta, dtype=float)
    if abs(np.linalg.norm(th) - 1) > 1e-12:
        raise FunctionError("ray direction must be a unit vector")
    T = th[None, :]
    tau = float(g.ray_support_end(T)[0])
    knots = g.ray_knots(T)[0]
    knots = tuple(float(k) for k in knots if np.isfinite(k))

    def psi(r, _g=g, _T=T):
        r = np.asarray(r, dtype=float)
        return _g.ray_values(_T, r.reshape(1, -1))[0].reshape(r.shape)

    return RayProfile(th, psi, tau, g.origin_value, knots)


@dataclass(frozen=True)
class Measure:
    """Borel measure with a log-concave density."""

    density: LogConcaveFn


# ------------------------------------------------------------------- factory


def make_function(family: str, params: dict | None = None) -> LogConcaveFn:
    """Instantiate a family by name; see the README for the parameter keys."""
    params = dict(params or {})
    if family == "gaussian":
        cov = params.get("covariance", params.get("variance", 1.0))
        return Gaussian(cov, params.get("dimension"), params.get("scale", 1.0))
    if family == "exp-norm":
        return ExpNorm(params.get("c", 1.0), params["dimension"])
    if family == "indicator":
        if "body" in params:
            body = params["body"]
            return Indicator(body if isinstance(body, ConvexBody) else body_from_spec(body))
        return Indicator(normals=params["normals"], offsets=params["offsets"])
    if family == "quadratic-exponential":
        if "matrix" in params:
            return QuadraticExponential(params["matrix"])
        return QuadraticExponential.from_coefficients(params["alpha"], params["beta"],
                                                      params.get("lambda", 0.0))
    if family == "product":
        return Product([_factor(f) for f in params["factors"]])
    if family == "restrict":
        base = _factor(params["function"])
        body = params.get("body")
        if body is not None and not isinstance(body, ConvexBody):
            body = body_from_spec(body)
        return restrict(base, body, params.get("normals"), params.get("offsets"))
    raise FunctionError(f"unknown family {family!r}")


def _factor(f):
    if isinstance(f, LogConcaveFn):
        return f
    return make_function(f["family"], f.get("params"))
