"""Batched quadrature rules for one-dimensional ray integrals.

All routines integrate many rays at once.  Integrands are passed as
``func(rid, u)`` with ``rid`` an integer array of ray indices (shape (I,))
and ``u`` the abscissae (shape (I, q)); they return values of shape (I, q).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_genlaguerre, roots_jacobi


class QuadratureError(RuntimeError):
    """Tolerance not met after the maximal refinement."""

    def __init__(self, message: str, achieved: float, index=None):
        super().__init__(f"{message} (achieved bound {achieved:.3e})")
        self.achieved = achieved
        self.index = index


@dataclass(frozen=True)
class QuadratureSpec:
    """Settings for the singular/smooth split of the ray integrals."""

    eta: object = "auto"
    jacobi_nodes: int = 48
    legendre_tol: float = 1e-9
    truncation_tol: float = 1e-10
    legendre_nodes: int = 16
    max_level: int = 40
    max_doublings: int = 200
    chunk: int = 2048

    def __post_init__(self):
        if self.eta != "auto" and not (isinstance(self.eta, (int, float)) and self.eta > 0):
            raise ValueError("eta must be 'auto' or a positive number")
        if self.jacobi_nodes < 2 or self.legendre_nodes < 2:
            raise ValueError("node counts must be at least 2")
        if not (self.legendre_tol > 0 and self.truncation_tol > 0):
            raise ValueError("tolerances must be positive")

    @classmethod
    def from_dict(cls, d: dict | None) -> "QuadratureSpec":
        d = dict(d or {})
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown quadrature fields: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@lru_cache(maxsize=256)
def jacobi_rule(n: int, beta: float):
    """Nodes/weights on [0, 1] for the weight v**beta (beta > -1)."""
    x, w = roots_jacobi(n, 0.0, beta)
    return (x + 1) / 2, w / 2.0 ** (beta + 1)


@lru_cache(maxsize=32)
def legendre_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


@lru_cache(maxsize=8)
def laguerre_rule(n: int, alpha: float = 1.0):
    """Nodes/weights for the weight t**alpha e**-t on (0, inf)."""
    return roots_genlaguerre(n, alpha)


def adaptive_legendre(func, rid: np.ndarray, a: np.ndarray, b: np.ndarray, m: int,
                      rtol: float, nodes: int = 16, max_level: int = 40):
    """Integrate over the intervals [a_i, b_i] belonging to rays rid_i.

    The first pass over the given pieces yields a rough value of each ray's
    integral; the ray tolerance is ``rtol`` times its magnitude.  An interval
    is accepted when its Gauss rule and the sum over its halves agree within
    the ray tolerance times the interval's share of the ray's total length;
    otherwise it is split.  Integrands are assumed not to change sign, so
    the rough value sets the right scale.  Returns per-ray integrals, error
    estimates and tolerances (arrays of length m).
    """
    x, w = legendre_rule(nodes)
    total = np.zeros(m)
    err = np.zeros(m)
    rid = np.asarray(rid, dtype=int)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    span = np.bincount(rid, weights=b - a, minlength=m)
    level = 0
    tol = None
    while len(rid):
        h = b - a
        mid = a + h / 2
        u = np.concatenate([a[:, None] + h[:, None] * x,
                            a[:, None] + (h / 2)[:, None] * x,
                            mid[:, None] + (h / 2)[:, None] * x], axis=1)
        v = func(rid, u)
        q = len(x)
        whole = h * (v[:, :q] @ w)
        halves = (h / 2) * (v[:, q:2 * q] @ w + v[:, 2 * q:] @ w)
        diff = np.abs(whole - halves)
        if tol is None:
            rough = np.abs(np.bincount(rid, weights=halves, minlength=m))
            tol = np.maximum(rtol * rough, 1e-300)
        allowed = tol[rid] * h / np.where(span[rid] > 0, span[rid], 1.0)
        done = (diff <= allowed) | ~np.isfinite(diff) | (level >= max_level)
        np.add.at(total, rid[done], halves[done])
        np.add.at(err, rid[done], diff[done])
        keep = ~done
        rid, a, b, mid = rid[keep], a[keep], b[keep], mid[keep]
        rid = np.concatenate([rid, rid])
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
        level += 1
    if tol is None:
        tol = np.full(m, 1e-300)
    return total, err, tol
