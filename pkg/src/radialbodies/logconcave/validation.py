"""Sampled checks of the class invariants, and envelope fitting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .functions import LogConcaveFn


@dataclass
class ValidationResult:
    ok: bool
    max_excess: float          # worst (g(x) - g(o)) / g(o)
    worst_concavity: float     # worst relative log-concavity defect
    envelope_ok: bool
    failures: list = field(default_factory=list)


def _probe_radius(g: LogConcaveFn) -> float:
    try:
        lo, hi = g.integration_box(1e-8)
        return float(np.max(np.abs(np.concatenate([lo, hi]))))
    except ValueError:
        return 4.0


def validate(g: LogConcaveFn, samples: int = 1000, seed: int = 0,
             tol: float = 1e-9) -> ValidationResult:
    """Max at o, log-concavity on collinear triples, and the envelope bound."""
    rng = np.random.default_rng(seed)
    n, R = g.dimension, _probe_radius(g)
    g0 = g.origin_value
    X = rng.uniform(-R, R, size=(samples, n))
    vals = g(X)
    excess = float(np.max((vals - g0) / g0))
    failures = []
    if excess > 1e-12:
        failures.append(f"value above g(o) by {excess:.3g} (relative)")
    # Collinear triples x, y, and a point strictly between them.
    Y = rng.uniform(-R, R, size=(samples, n))
    lam = rng.uniform(0.05, 0.95, size=samples)
    gx, gy = vals, g(Y)
    gm = g((1 - lam)[:, None] * X + lam[:, None] * Y)
    pos = (gx > 0) & (gy > 0)
    with np.errstate(divide="ignore"):
        rhs = np.exp((1 - lam[pos]) * np.log(gx[pos]) + lam[pos] * np.log(gy[pos]))
    defect = (rhs - gm[pos]) / np.maximum(rhs, 1e-300)
    worst = float(defect.max()) if defect.size else 0.0
    if worst > tol:
        failures.append(f"log-concavity defect {worst:.3g}")
    env_ok = True
    if g.envelope is not None:
        a, c = g.envelope
        bound = a * np.exp(-c * np.linalg.norm(X, axis=1))
        env_ok = bool(np.all(vals <= bound * (1 + 1e-12)))
        if not env_ok:
            failures.append("envelope a e^{-c|x|} violated")
    return ValidationResult(not failures, excess, worst, env_ok, failures)


def fit_envelope(g: LogConcaveFn, samples: int = 1000, seed: int = 0,
                 max_widen: int = 60):
    """(a, c) with g(x) <= a e^{-c|x|} on sampled points.

    c comes from the two-point log slope between o and a probe radius
    along sampled rays; a starts at g(o) and is doubled until the sampled
    bound holds.
    """
    rng = np.random.default_rng(seed)
    n, R = g.dimension, _probe_radius(g)
    th = rng.standard_normal((64, n))
    th /= np.linalg.norm(th, axis=1, keepdims=True)
    r2 = R / 4
    v2 = g.ray_values(th, np.full((64, 1), r2))[:, 0]
    with np.errstate(divide="ignore"):
        slopes = (math.log(g.origin_value) - np.log(v2)) / r2
    slopes = slopes[np.isfinite(slopes) & (slopes > 0)]
    c = float(slopes.min()) if slopes.size else 1.0 / R
    a = g.origin_value
    X = rng.uniform(-R, R, size=(samples, n))
    vals = g(X)
    norms = np.linalg.norm(X, axis=1)
    for _ in range(max_widen):
        if np.all(vals <= a * np.exp(-c * norms)):
            return a, c
        a *= 2
    raise ValueError("could not fit an exponential envelope")
