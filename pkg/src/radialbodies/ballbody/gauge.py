"""Gauges of the Ball bodies K_p(g) for p in (-1, inf].

Along a unit direction theta with profile psi(r) = g(r theta), psi(0) = g(o):

* p > 0:      ‖theta‖ = (p/psi(0) ∫ psi r^{p-1} dr)^{-1/p}
* -1 < p < 0: ‖theta‖ = (p/psi(0) ∫ r^{p-1} (psi - psi(0)) dr)^{-1/p}
* p = 0:      ‖theta‖ = exp(-1/psi(0) ∫ (-psi') log r dr)
* p = inf:    ‖theta‖ = 1 / tau, tau the end of the support of psi.

Integrals run in the scaled variable u = r / s, where s is the support end
(or a truncation point for unbounded support), and split at eta: a
Gauss–Jacobi rule absorbs the power singularity on [0, eta] and batched
adaptive Gauss–Legendre covers the remaining pieces between known kinks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ..geometry import DirectionGrid
from ..logconcave.functions import LogConcaveFn, RayProfile
from .quadrature import (QuadratureError, QuadratureSpec, adaptive_legendre, jacobi_rule,
                         laguerre_rule, legendre_rule)

ZERO_BAND = 1e-3
RICHARDSON_STEP = 1e-3
FD_STEP = 1e-3
THREADS_ENV = "RADIAL_BODIES_THREADS"


@dataclass(frozen=True)
class PIndex:
    """An exponent p in (-1, inf] and the branch of the gauge formula it uses."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v) or not v > -1:
            raise ValueError(f"p must lie in (-1, inf], got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, p) -> "PIndex":
        if isinstance(p, PIndex):
            return p
        if isinstance(p, str) and p.strip().lower() in ("inf", "infinity", "∞", "+inf"):
            return cls(math.inf)
        return cls(float(p))

    @property
    def branch(self) -> str:
        if math.isinf(self.value):
            return "infinity"
        if abs(self.value) < ZERO_BAND:
            return "zero"
        return "negative" if self.value < 0 else "positive"

    def __float__(self):
        return self.value


class StarGauge:
    """A positively 1-homogeneous function x -> ‖x‖ in [0, inf].

    ``grid``/``radii`` optionally hold sampled radial values
    rho(theta) = 1/‖theta‖ on a direction grid.
    """

    def __init__(self, dimension: int, evaluator, grid: DirectionGrid | None = None,
                 radii=None, label: str = ""):
        self.dimension = dimension
        self.evaluator = evaluator
        self.grid = grid
        self.radii = None if radii is None else np.asarray(radii, dtype=float)
        self.label = label

    def __call__(self, x):
        X = np.asarray(x, dtype=float)
        flat = X.reshape(-1, self.dimension)
        return np.asarray(self.evaluator(flat), dtype=float).reshape(X.shape[:-1])

    def radial(self, thetas):
        with np.errstate(divide="ignore"):
            return 1.0 / self(thetas)

    def __repr__(self):
        return f"StarGauge({self.label or 'anonymous'}, n={self.dimension})"


def euclidean_gauge(dimension: int, radius: float = 1.0) -> StarGauge:
    return StarGauge(dimension, lambda X: np.linalg.norm(X, axis=-1) / radius,
                     label=f"euclidean ball r={radius}")


def gaussian_radius(p: float, sigma: float = 1.0) -> float:
    """Radius of K_p of exp(-|x|^2 / (2 sigma^2)): (p 2^{p/2-1} Γ(p/2))^{1/p} sigma."""
    if math.isinf(p):
        return math.inf
    if abs(p) < 1e-12:
        return sigma * math.exp((math.log(2) - np.euler_gamma) / 2)
    # p 2^{p/2-1} Γ(p/2) = 2^{p/2} Γ(1 + p/2), positive on (-1, inf).
    return sigma * math.exp((p / 2 * math.log(2) + gammaln(1 + p / 2)) / p)


# ----------------------------------------------------------------- internals


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


class _Rays:
    """The live rays of one chunk: profiles, scales and integration pieces."""

    def __init__(self, g: LogConcaveFn, T: np.ndarray, tau: np.ndarray, p: float,
                 q: QuadratureSpec):
        self.g, self.T, self.tau, self.p, self.q = g, T, tau, p, q
        self.psi0 = g.origin_value
        self.m = len(T)
        self.s = tau.copy()
        unbounded = ~np.isfinite(tau)
        if unbounded.any():
            self.s[unbounded] = self._truncate(np.flatnonzero(unbounded))
        knots = np.asarray(g.ray_knots(T), dtype=float).reshape(self.m, -1)
        knots = np.where((knots > 0) & (knots < self.s[:, None] * (1 - 1e-13)), knots, np.nan)
        self.eta = self._split(knots)
        self.e = self.eta / self.s
        ku = knots / self.s[:, None]
        ku = np.where(ku > self.e[:, None] * (1 + 1e-13), ku, np.nan)
        bounds = np.concatenate([self.e[:, None], ku, np.ones((self.m, 1))], axis=1)
        self.bounds = np.sort(bounds, axis=1)  # NaN sorts last

    def psi(self, rid, r):
        return self.g.ray_values(self.T[rid], r)

    def phi(self, rid, u):
        return self.psi(rid, self.s[rid][:, None] * u)

    def _drop_radius(self, idx, level):
        """Radius where psi first falls below level * psi0 (per ray)."""
        r = np.ones(len(idx))
        v = self.psi(idx, r[:, None])[:, 0]
        for _ in range(200):
            high = v >= level * self.psi0
            if not high.any():
                break
            r = np.where(high, 2 * r, r)
            v = self.psi(idx, r[:, None])[:, 0]
        lo, hi = np.zeros(len(idx)), r
        for _ in range(60):
            mid = (lo + hi) / 2
            above = self.psi(idx, mid[:, None])[:, 0] >= level * self.psi0
            lo, hi = np.where(above, mid, lo), np.where(above, hi, mid)
        return hi

    def _truncate(self, idx):
        """Truncation points from the log-concave secant tail bound.

        Beyond T, log psi lies below its secant through T/2 and T, so
        ∫_T^∞ psi r^{p-1} <= psi(T) T^{p-1} / (kappa - max(p-1, 0)/T).
        """
        p, q, psi0 = self.p, self.q, self.psi0
        rho0 = self._drop_radius(idx, math.exp(-1))
        T = 2 * rho0
        out = np.full(len(idx), np.nan)
        todo = np.ones(len(idx), bool)
        log_target = (math.log(q.truncation_tol * psi0) + p * np.log(rho0)
                      - math.log(max(1.0, abs(p))))
        worst = np.inf
        for _ in range(q.max_doublings):
            j = np.flatnonzero(todo)
            vT = self.psi(idx[j], T[j, None])[:, 0]
            vH = self.psi(idx[j], T[j, None] / 2)[:, 0]
            with np.errstate(divide="ignore", invalid="ignore"):
                kappa = (np.log(vH) - np.log(vT)) / (T[j] / 2)
                denom = kappa - max(p - 1, 0.0) / T[j]
                log_bound = np.log(vT) + (p - 1) * np.log(T[j]) - np.log(denom)
            ok = (vT == 0) | ((denom > 0) & (log_bound <= log_target[j]))
            excess = (log_bound - log_target[j])[~ok]
            excess = excess[np.isfinite(excess)]
            worst = float(excess.max()) if excess.size else worst
            out[j[ok]] = T[j[ok]]
            todo[j[ok]] = False
            if not todo.any():
                return out
            T[j[~ok]] *= 2
        raise QuadratureError("tail truncation failed: the integral may diverge",
                              float(np.exp(worst)) * q.truncation_tol)

    def _split(self, knots):
        q = self.q
        half = self.s / 2
        if q.eta != "auto":
            return np.minimum(float(q.eta), half)
        eta = half.copy()
        with np.errstate(all="ignore"):
            first = np.nanmin(np.where(np.isnan(knots), np.inf, knots), axis=1, initial=np.inf)
        eta = np.minimum(eta, first)
        if not self.g.exact_knots:
            idx = np.arange(self.m)
            v = self.psi(idx, eta[:, None])[:, 0]
            low = v < 0.99 * self.psi0
            if low.any():
                j = idx[low]
                lo, hi = np.zeros(len(j)), eta[j].copy()
                for _ in range(60):
                    mid = (lo + hi) / 2
                    above = self.psi(j, mid[:, None])[:, 0] >= 0.99 * self.psi0
                    lo, hi = np.where(above, mid, lo), np.where(above, hi, mid)
                eta[j] = np.maximum(hi, 1e-6 * self.s[j])
        return eta

    def pieces(self):
        a, b = self.bounds[:, :-1], self.bounds[:, 1:]
        ok = np.isfinite(a) & np.isfinite(b) & (b > a)
        rid = np.broadcast_to(np.arange(self.m)[:, None], a.shape)[ok]
        return rid, a[ok], b[ok]

    # -- integrals ------------------------------------------------------

    def jacobi(self, h, beta):
        """∫_0^e h(rid, u) u^beta du for every ray."""
        v, w = jacobi_rule(self.q.jacobi_nodes, float(beta))
        u = self.e[:, None] * v[None, :]
        vals = h(np.arange(self.m), u)
        return self.e ** (beta + 1) * (vals @ w)

    def legendre(self, integrand):
        rid, a, b = self.pieces()
        total, err, tol = adaptive_legendre(integrand, rid, a, b, self.m, self.q.legendre_tol,
                                            self.q.legendre_nodes, self.q.max_level)
        bad = ~(err <= tol)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise QuadratureError("adaptive Gauss–Legendre did not reach the tolerance",
                                  float(np.nanmax(err[bad])), index=i)
        return total

    def derivative(self, rid, u):
        """-d phi/du by a five-point stencil kept inside the smooth piece."""
        B = np.concatenate([np.zeros((self.m, 1)), self.bounds], axis=1)[rid]
        dist = np.nanmin(np.abs(u[:, :, None] - B[:, None, :]), axis=2)
        h = np.minimum(FD_STEP, dist / 2.5)
        f = lambda t: self.phi(rid, u + t * h)
        d = (f(-2) - 8 * f(-1) + 8 * f(1) - f(2)) / (12 * h)
        return -d

    def jump(self):
        """Mass of -d phi at u = 1 when psi drops to zero discontinuously."""
        u = np.full((self.m, 1), 1 - 1e-12)
        v = self.phi(np.arange(self.m), u)[:, 0]
        return np.where(np.isfinite(self.tau) & (v > 1e-9 * self.psi0), v, 0.0)


def _four_branch(R: _Rays) -> np.ndarray:
    p, psi0 = R.p, R.psi0
    if p > 0:
        jac = R.jacobi(R.phi, p - 1)
    else:
        jac = R.jacobi(lambda rid, u: (R.phi(rid, u) - psi0) / u, p)
    with np.errstate(divide="ignore", under="ignore"):
        leg = R.legendre(lambda rid, u: R.phi(rid, u) * np.exp((p - 1) * np.log(u)))
    if p == 0:
        L = psi0 * np.log(R.e) + jac + leg
        return np.exp(-L / psi0) / R.s
    val = jac + leg
    if p < 0:
        val = val + psi0 * R.e ** p / p
    pv = p * val / psi0
    if np.any(~(pv > 0)):
        i = int(np.flatnonzero(~(pv > 0))[0])
        raise QuadratureError("moment integral has the wrong sign", float(abs(pv[i])), index=i)
    return np.exp(-np.log(pv) / p) / R.s


def _unified(R: _Rays) -> np.ndarray:
    p, psi0 = R.p, R.psi0
    jac = R.jacobi(R.derivative, p)
    with np.errstate(divide="ignore", under="ignore"):
        leg = R.legendre(lambda rid, u: R.derivative(rid, u) * np.exp(p * np.log(u)))
    val = (jac + leg + R.jump()) / psi0
    return np.exp(-np.log(val) / p) / R.s


def _log_form(R: _Rays) -> np.ndarray:
    """p = 0 through the log-weighted derivative integral."""
    psi0, e = R.psi0, R.e
    x, w = legendre_rule(R.q.jacobi_nodes)
    idx = np.arange(R.m)
    first = (R.derivative(idx, e[:, None] * x[None, :]) @ w) * e * np.log(e)
    t, wl = laguerre_rule(64, 1.0)
    second = -(R.derivative(idx, e[:, None] * np.exp(-t)[None, :]) @ wl) * e
    with np.errstate(divide="ignore"):
        leg = R.legendre(lambda rid, u: R.derivative(rid, u) * np.log(u))
    L = first + second + leg
    return np.exp(-L / psi0) / R.s


_FORMS = {"four-branch": _four_branch, "unified": _unified, "log": _log_form}


def _chunk_gauges(g: LogConcaveFn, p: float, T: np.ndarray, q: QuadratureSpec,
                  form: str, offset: int) -> np.ndarray:
    out = np.full(len(T), np.nan)
    tau = np.asarray(g.ray_support_end(T), dtype=float)
    dead = ~(tau > 0)
    out[dead] = np.inf  # no positive values along the ray
    live = np.flatnonzero(~dead)
    if math.isinf(p):
        out[live] = 1.0 / tau[live]
        return out
    if len(live) == 0:
        return out
    try:
        R = _Rays(g, T[live], tau[live], p, q)
        out[live] = _FORMS[form](R)
    except QuadratureError as exc:
        if exc.index is not None:
            exc.index = offset + int(live[exc.index])
        raise
    return out


def ray_gauges(g: LogConcaveFn, p, thetas, q: QuadratureSpec | None = None,
               form: str = "four-branch") -> np.ndarray:
    """‖theta‖_{K_p(g)} for unit directions (rows of ``thetas``)."""
    q = q or QuadratureSpec()
    T = np.atleast_2d(np.asarray(thetas, dtype=float))
    pv = float(PIndex.parse(p))
    chunks = [(i, T[i:i + q.chunk]) for i in range(0, len(T), q.chunk)]
    run = lambda c: _chunk_gauges(g, pv, c[1], q, form, c[0])
    threads = _threads()
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    return np.concatenate(parts) if parts else np.zeros(0)


def _homogeneous(g, p, x, q, form):
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != g.dimension:
        raise ValueError(f"expected points in R^{g.dimension}")
    norms = np.linalg.norm(X, axis=1)
    out = np.zeros(len(X))
    nz = norms > 0
    if nz.any():
        out[nz] = norms[nz] * ray_gauges(g, p, X[nz] / norms[nz, None], q, form)
    return float(out[0]) if single else out


def ball_gauge(g: LogConcaveFn, p, x, q: QuadratureSpec | None = None,
               zero_method: str = "by-parts"):
    """‖x‖_{K_p(g)} by the four-branch definition.

    ``zero_method`` selects the p = 0 evaluation: ``by-parts`` (the log
    integral after integrating by parts), ``richardson`` (symmetric
    extrapolation of the finite branches at p = ±1e-3) or ``log`` (the
    log-weighted derivative integral).
    """
    P = PIndex.parse(p)
    if P.branch == "zero":
        if zero_method == "richardson":
            up = _homogeneous(g, RICHARDSON_STEP, x, q, "four-branch")
            down = _homogeneous(g, -RICHARDSON_STEP, x, q, "four-branch")
            return 0.5 * (np.asarray(up) + np.asarray(down)) if np.ndim(up) else 0.5 * (up + down)
        if zero_method == "log":
            return _homogeneous(g, 0.0, x, q, "log")
        if zero_method != "by-parts":
            raise ValueError(f"unknown zero_method {zero_method!r}")
        return _homogeneous(g, 0.0, x, q, "four-branch")
    return _homogeneous(g, P.value, x, q, "four-branch")


def ball_gauge_unified(g: LogConcaveFn, p, x, q: QuadratureSpec | None = None):
    """‖x‖ through (1/g(o) ∫ (-∂_r g(rx)) r^p dr)^{-1/p}.

    The radial derivative is a five-point finite difference; a jump of g at
    the end of the support enters as a point mass.  p in the zero band uses
    the log-weighted version of the same integral.
    """
    P = PIndex.parse(p)
    if P.branch == "infinity":
        return ball_gauge(g, P, x, q)
    if P.branch == "zero":
        return _homogeneous(g, 0.0, x, q, "log")
    return _homogeneous(g, P.value, x, q, "unified")


def i_p(psi: RayProfile, p, q: QuadratureSpec | None = None) -> float:
    """I_p(psi): the reciprocal of the gauge along the profile's ray."""
    P = PIndex.parse(p)
    if P.branch == "infinity":
        return float(psi.support_end)
    fn = psi.as_function()
    g = float(ball_gauge(fn, P, np.array([1.0]), q))
    return 1.0 / g


def radial_samples(g: LogConcaveFn, p, grid: DirectionGrid,
                   q: QuadratureSpec | None = None) -> StarGauge:
    """Sampled gauge of K_p(g) with radii rho(theta) = 1/‖theta‖ on the grid."""
    P = PIndex.parse(p)
    gauges = np.asarray(ball_gauge(g, P, grid.directions, q), dtype=float).reshape(len(grid))
    with np.errstate(divide="ignore"):
        radii = 1.0 / gauges
    return StarGauge(g.dimension, lambda X: ball_gauge(g, P, X, q), grid, radii,
                     label=f"K_{P.value:g}")
