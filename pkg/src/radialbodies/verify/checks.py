"""Numerical checks of the convexity, inequality and limit statements.

Each check returns a VerificationReport.  Violations are normalised so that
a check passes iff its worst violation is at most the reported tolerance.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from ..ballbody import (PIndex, QuadratureSpec, StarGauge, ball_gauge, gaussian_radius, i_p,
                        radial_samples)
from ..ballbody.gauge import RICHARDSON_STEP
from ..geometry import (ConvexBody, DirectionGrid, difference_body_gauge, polar_projection_gauge,
                        volume)
from ..logconcave import Gaussian, LogConcaveFn, RayProfile, mollify, unique_max
from ..radialmean import radial_mean_samples, scaled_limit_samples
from .report import Timer, VerificationReport, make_report
from .smooth2d import Smooth2DFn

FINE = QuadratureSpec(legendre_tol=1e-13, truncation_tol=1e-14)


def _vec(x):
    return np.round(np.asarray(x, dtype=float), 12).tolist()


# ---------------------------------------------------------------- convexity


def check_subadditivity(gauge: StarGauge, pairs: int = 10_000, seed: int = 0,
                        tol: float = 1e-5, instance: str = "") -> VerificationReport:
    """‖u+v‖ <= ‖u‖ + ‖v‖ on seeded Gaussian pairs, relative to ‖u‖ + ‖v‖."""
    with Timer() as t:
        rng = np.random.default_rng(seed)
        n = gauge.dimension
        U = rng.standard_normal((pairs, n))
        V = rng.standard_normal((pairs, n))
        vals = gauge(np.vstack([U, V, U + V]))
        bad = ~np.isfinite(vals)
        if bad.any():
            i = int(np.argmax(bad))
            x = np.vstack([U, V, U + V])[i]
            raise ValueError(f"non-finite gauge in direction {_vec(x / np.linalg.norm(x))}")
        gu, gv, gw = vals[:pairs], vals[pairs:2 * pairs], vals[2 * pairs:]
        viol = (gw - gu - gv) / (gu + gv)
    return make_report("subadditivity", instance or repr(gauge), viol, tol,
                       lambda i: {"input": [_vec(U[i]), _vec(V[i])], "lhs": gw[i],
                                  "rhs": gu[i] + gv[i]},
                       seed, t.elapsed, {"pairs": pairs, "max_margin": float(viol.max())})


def check_directional_convexity(gauge: StarGauge, u, theta, h: float = 1e-3, c: float = 1.0,
                                gauge_eps: float = 1e-9, instance: str = "") -> VerificationReport:
    """Second differences (‖u+hθ‖ - 2‖u‖ + ‖u-hθ‖)/h^2 >= -tol(h).

    tol(h) = c*h plus the rounding term 4*gauge_eps*‖u‖/h^2, reported per probe.
    """
    with Timer() as t:
        U = np.atleast_2d(np.asarray(u, dtype=float))
        Th = np.atleast_2d(np.asarray(theta, dtype=float))
        Th = Th / np.linalg.norm(Th, axis=1, keepdims=True)
        vals = gauge(np.vstack([U + h * Th, U, U - h * Th]))
        m = len(U)
        plus, mid, minus = vals[:m], vals[m:2 * m], vals[2 * m:]
        second = (plus - 2 * mid + minus) / h ** 2
        budget = c * h + 4 * gauge_eps * mid / h ** 2
        # normalise so that pass <=> -second <= budget
        scale = budget.max()
        viol = -second / budget * scale
    return make_report("directional_convexity", instance or repr(gauge), viol, scale,
                       lambda i: {"input": [_vec(U[i]), _vec(Th[i])], "lhs": second[i],
                                  "rhs": -budget[i]},
                       None, t.elapsed, {"h": h, "second_differences": second,
                                         "tolerances": budget})


def check_H_inequality(g: LogConcaveFn, p, u, theta, h: float | None = None,
                       q: QuadratureSpec | None = None, tol: float = 1e-6,
                       instance: str = "") -> VerificationReport:
    """p Ḧ/H <= (1+p) (Ḣ/H)^2 for H(t) = ‖u + tθ‖^{-p} at t = 0.

    Derivatives come from 5-point stencils with steps h and 2h; the budget is
    |D(h) - D(2h)| (the truncation term) plus a floor from the quadrature
    accuracy.  Both sides are scaled by (|p| + p^2)/|u|^2.
    """
    P = PIndex.parse(p)
    if P.branch in ("zero", "infinity"):
        raise ValueError("the H-inequality needs p != 0 and finite")
    pv = P.value
    q = q or FINE
    with Timer() as t:
        u = np.asarray(u, dtype=float)
        th = np.asarray(theta, dtype=float)
        th = th / np.linalg.norm(th)
        nu = float(np.linalg.norm(u))
        h = h or 1e-4 * nu
        steps = np.array([-4, -2, -1, 0, 1, 2, 4]) * h
        G = np.asarray(ball_gauge(g, P, u[None, :] + steps[:, None] * th[None, :], q))
        if not np.all(np.isfinite(G) & (G > 0)):
            raise ValueError("the stencil leaves the region where the gauge is finite")
        H = G ** (-pv)
        Hm4, Hm2, Hm1, H0, H1, H2, H4 = H

        def sides(a1, a2, a_1, a_2, s):
            d1 = (-a2 + 8 * a1 - 8 * a_1 + a_2) / (12 * s)
            d2 = (-a2 + 16 * a1 - 30 * H0 + 16 * a_1 - a_2) / (12 * s * s)
            return pv * d2 / H0, (1 + pv) * (d1 / H0) ** 2

        lhs, rhs = sides(H1, H2, Hm1, Hm2, h)
        lhs2, rhs2 = sides(H2, H4, Hm2, Hm4, 2 * h)
        scale = (abs(pv) + pv * pv) / nu ** 2
        trunc = abs((lhs - rhs) - (lhs2 - rhs2))
        floor = 64 / 12 * abs(pv) * (q.legendre_tol * 10) / h ** 2
        budget = (trunc + floor) / scale
        viol = (lhs - rhs) / scale
    rep = make_report("H_inequality", instance or f"p={pv:g}", [viol], tol + budget,
                      lambda i: {"input": [_vec(u), _vec(th)], "lhs": lhs, "rhs": rhs},
                      None, t.elapsed,
                      {"lhs": lhs, "rhs": rhs, "margin": (rhs - lhs) / scale,
                       "stencil_budget": budget, "h": h})
    rep.details["collinear"] = bool(abs(abs(float(th @ u)) - nu) <= 1e-12 * nu)
    rep.details["equality_within_budget"] = bool(abs(lhs - rhs) / scale <= tol + budget)
    return rep


# ------------------------------------------------------- determinant inequality


def _weighted(fun, power: float, R: float, lower: float = 0.0) -> float:
    """∫_lower^R r^power fun(r) dr."""
    g = lambda r: float(fun(np.array([r]))[0])
    if lower == 0.0 and power != 0.0:
        val, _ = quad(g, 0.0, R, weight="alg", wvar=(power, 0.0), limit=400,
                      epsabs=0.0, epsrel=1e-13)
    else:
        val, _ = quad(lambda r: r ** power * g(r), lower, R, limit=400, epsabs=0.0,
                      epsrel=1e-13)
    return val


def _riemann(fun, power: float, R: float, n: int = 600_000) -> float:
    h = R / n
    r = (np.arange(n) + 0.5) * h
    return float(h * np.sum(r ** power * fun(r)))


def check_det_inequality(f: Smooth2DFn, p, q: QuadratureSpec | None = None, tol: float = 1e-6,
                         byparts_tol: float = 1e-7, oracle_tol: float = 1e-4,
                         oracle_extent: float = 30.0) -> VerificationReport:
    """A*C - B^2 <= tol * scale^2 for the r^{p+1}-weighted partial integrals at s = 0.

    A = ∫ r^{p+1} f_rr, C = ∫ r^{p+1} f_ss, B = ∫ r^{p+1} f_rs (over r >= 0) and
    scale = max(|A|, |B|, |C|).  A is cross-checked against -(p+1) ∫ r^p f_r,
    and all three against a midpoint Riemann sum on [0, max(30, decay)].
    """
    P = PIndex.parse(p)
    if P.branch in ("zero", "infinity"):
        raise ValueError("the determinant inequality needs p != 0 and finite")
    pv = P.value
    with Timer() as t, warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        R = f.decay_radius()
        part = lambda name: (lambda r: f.partial(name, r, np.zeros_like(r)))
        A = _weighted(part("f_rr"), pv + 1, R)
        C = _weighted(part("f_ss"), pv + 1, R)
        B = _weighted(part("f_rs"), pv + 1, R)
        A_bp = -(pv + 1) * _weighted(part("f_r"), pv, R)
        Ro = max(oracle_extent, R)
        oracle = [_riemann(part(nm), pv + 1, Ro) for nm in ("f_rr", "f_ss", "f_rs")]
        scale = max(abs(A), abs(B), abs(C))
        # numerical partials: widen the consistency budgets by their error bound
        fd = lambda name: _riemann(lambda r: f.fd_error(name, r, np.zeros_like(r)), pv + 1 - (name == "f_r"), Ro)
        fd_budget = max(fd("f_rr"), fd("f_ss"), fd("f_rs"), (pv + 1) * fd("f_r")) / scale
        det = A * C - B * B
        v_det = det / scale ** 2
        v_bp = abs(A - A_bp) / scale * (tol / (byparts_tol + fd_budget))
        v_or = max(abs(x - y) for x, y in zip((A, C, B), oracle)) / scale * (tol / (oracle_tol + fd_budget))
    labels = ["det", "by-parts", "oracle"]
    viols = [v_det, v_bp, v_or]
    return make_report("det_inequality", f"{f.label}, p={pv:g}", viols, tol,
                       lambda i: {"input": labels[i], "lhs": [det, A, A][i],
                                  "rhs": [0.0, A_bp, oracle[0]][i]},
                       None, t.elapsed,
                       {"A": A, "B": B, "C": C, "det": det, "scale": scale, "A_by_parts": A_bp,
                        "oracle": {"A": oracle[0], "C": oracle[1], "B": oracle[2]},
                        "fd_budget": fd_budget})


def check_prekopa_marginal(f: Smooth2DFn, a_grid=(0.0, 0.5, 1.0), p: float = 1.0,
                           tol: float = 1e-9) -> VerificationReport:
    """Midpoint log-concavity of Phi(a) = ∫ r^{p+1} f(r + a, 0) dr on the grid.

    The violation of a pair is Phi(a1) Phi(a2) / Phi(mid)^2 - 1, which is
    invariant under scaling f.
    """
    with Timer() as t:
        R = f.decay_radius()
        a = np.sort(np.asarray(a_grid, dtype=float))

        def Phi(x):
            fun = lambda r: f(np.column_stack([r + x, np.zeros_like(r)]))
            return _weighted(fun, p + 1, R + max(0.0, -x), lower=max(0.0, -x))

        vals = {x: Phi(x) for x in a}
        pairs, viol, wit = [], [], []
        for i in range(len(a)):
            for j in range(i + 1, len(a)):
                m = 0.5 * (a[i] + a[j])
                if m not in vals:
                    vals[m] = Phi(m)
                lhs, rhs = vals[m] ** 2, vals[a[i]] * vals[a[j]]
                pairs.append((a[i], a[j]))
                viol.append(rhs / lhs - 1 if lhs > 0 else (math.inf if rhs > 0 else 0.0))
                wit.append({"input": [a[i], a[j]], "lhs": lhs, "rhs": rhs})
    return make_report("prekopa_marginal", f"{f.label}, p={p:g}", viol, tol,
                       lambda i: wit[i], None, t.elapsed,
                       {"phi": {f"{k:.12g}": v for k, v in sorted(vals.items())},
                        "margins": [-v for v in viol]})


# ---------------------------------------------------------- p-dependence


def check_monotonicity(g: LogConcaveFn, p_list, grid: DirectionGrid,
                       q: QuadratureSpec | None = None, tol: float = 1e-7,
                       continuity_tol: float = 5e-3, instance: str = "") -> VerificationReport:
    """gauge_p >= gauge_q for consecutive p < q (relative), on every grid direction.

    If 0 is in the list, the p = 0 gauge is also compared with the finite
    branches at p = ±1e-3 (relative difference at most ``continuity_tol``).
    """
    ps = sorted(float(PIndex.parse(p)) for p in p_list)
    with Timer() as t:
        G = np.array([np.asarray(ball_gauge(g, p, grid.directions, q)).reshape(len(grid))
                      for p in ps])
        with np.errstate(invalid="ignore"):
            rel = (G[1:] - G[:-1]) / G[:-1]
        rel = np.where(np.isnan(rel), 0.0, rel)
        viol = list(rel.ravel())
        wit = [(i, j) for i in range(len(ps) - 1) for j in range(len(grid))]
        cont = None
        if 0.0 in ps:
            g0 = G[ps.index(0.0)]
            side = [np.asarray(ball_gauge(g, s * RICHARDSON_STEP, grid.directions, q))
                    for s in (1, -1)]
            cont = max(float(np.max(np.abs(s - g0) / g0)) for s in side)
            viol.append(cont * tol / continuity_tol)
            wit.append(None)

    def witness(i):
        if wit[i] is None:
            return {"input": "p=0 vs p=+-1e-3", "lhs": cont, "rhs": continuity_tol}
        k, j = wit[i]
        return {"input": [ps[k], ps[k + 1], _vec(grid.directions[j])],
                "lhs": G[k + 1, j], "rhs": G[k, j]}

    return make_report("monotonicity", instance or f"p={ps}", viol, tol, witness, None,
                       t.elapsed, {"p_list": ps, "max_relative_increase": float(rel.max()),
                                   "zero_branch_deviation": cont})


def check_ip_properties(psi: RayProfile, p_list, q: QuadratureSpec | None = None,
                        tol: float = 1e-9, limit_p: float = 200.0, limit_tol: float = 0.01,
                        escape_factor: float = 10.0, instance: str = "") -> VerificationReport:
    """I_p(psi) non-decreasing in p; constant for indicator profiles; I_200 near
    the support end (compact support) or beyond escape_factor * I_1 (full support)."""
    ps = sorted(float(PIndex.parse(p)) for p in p_list)
    with Timer() as t:
        I = np.array([i_p(psi, p, q) for p in ps])
        viol = list((I[:-1] - I[1:]) / I[:-1])
        wit = [{"input": [ps[k], ps[k + 1]], "lhs": I[k], "rhs": I[k + 1]}
               for k in range(len(ps) - 1)]
        tau = psi.support_end
        I_lim = i_p(psi, limit_p, q)
        compact = math.isfinite(tau)
        indicator = False
        if compact:
            r = np.linspace(0.0, tau, 65)[:-1]
            indicator = bool(np.all(psi(r) == psi.origin_value))
            dev = abs(I_lim - tau) / tau
            viol.append(dev * tol / limit_tol)
            wit.append({"input": f"I_{limit_p:g} vs support end", "lhs": I_lim, "rhs": tau})
            if indicator:
                for k, p in enumerate(ps):
                    viol.append(abs(I[k] - tau) / tau)
                    wit.append({"input": f"indicator constancy p={p:g}", "lhs": I[k], "rhs": tau})
        else:
            bound = escape_factor * i_p(psi, 1.0, q)
            viol.append(tol * (1.0 + (bound - I_lim) / bound) if I_lim <= bound else 0.0)
            wit.append({"input": f"I_{limit_p:g} escape", "lhs": I_lim, "rhs": bound})
    return make_report("ip_properties", instance or "profile", viol, tol, lambda i: wit[i],
                       None, t.elapsed,
                       {"p_list": ps, "values": I, "limit_value": I_lim, "support_end": tau,
                        "indicator": indicator,
                        "limit_deviation": abs(I_lim - tau) / tau if compact else None})


def check_limits(K: ConvexBody, grid: DirectionGrid, q: QuadratureSpec | None = None,
                 tol: float = 0.01, p_high: float = 200.0, p_low: float = -0.999,
                 instance: str = "") -> VerificationReport:
    """(i) rho_{R_200 K} vs rho_{DK}; (ii) (1+p)^{1/p} rho_{R_p K} at p = -0.999 vs
    rho of the polar projection body; both as max relative deviation over the grid.

    Also reports, without asserting, the deviation of (ii) from Vol(K) times the
    polar projection radial function.
    """
    if K.dimension > 3:
        raise ValueError("limits are checked for n <= 3")
    with Timer() as t:
        D = grid.directions
        high = radial_mean_samples(K, p_high, grid, q).radii
        dk = 1.0 / np.asarray(difference_body_gauge(K, D)).reshape(len(grid))
        low = scaled_limit_samples(K, p_low, grid, q).radii
        pp = np.array([1.0 / polar_projection_gauge(K, th) for th in D])
        dev_high = np.abs(high - dk) / dk
        dev_low = np.abs(low - pp) / pp
        vol = volume(K)
        dev_norm = np.abs(low - vol * pp) / (vol * pp)
    m = len(grid)
    viol = np.concatenate([dev_high, dev_low])

    def witness(i):
        j = i % m
        if i < m:
            return {"input": f"p={p_high:g} theta={_vec(D[j])}", "lhs": high[j], "rhs": dk[j]}
        return {"input": f"p={p_low:g} theta={_vec(D[j])}", "lhs": low[j], "rhs": pp[j]}

    return make_report("limits", instance or K.kind, viol, tol, witness, None, t.elapsed,
                       {"difference_body_deviation": float(dev_high.max()),
                        "polar_projection_deviation": float(dev_low.max()),
                        "volume": vol,
                        "volume_scaled_polar_projection_deviation": float(dev_norm.max())})


# ---------------------------------------------------------- approximation


def check_mollify_convergence(g: LogConcaveFn, p, k_list, probes,
                              q: QuadratureSpec | None = None, j: float = 1e6,
                              method: str = "auto", instance: str = "") -> VerificationReport:
    """e_k = |‖x‖_{K_p(g_k)} - ‖x‖_{K_p(g)}| at the probes, for g_k the mollified
    e^{-|x|^2/j} g; requires finite e_k and e_{k_last} <= e_{k_first}.

    For a Gaussian g the exact gauge of g_k (variance increased by 2/k) is
    reported alongside.
    """
    X = np.atleast_2d(np.asarray(probes, dtype=float))
    ks = list(k_list)
    with Timer() as t:
        base = np.asarray(ball_gauge(g, p, X, q))
        gj = unique_max(g, j)
        E, vals, closed = [], [], []
        for k in ks:
            gk = mollify(gj, k, method)
            v = np.asarray(ball_gauge(gk, p, X, q))
            vals.append(v)
            E.append(np.abs(v - base))
            if isinstance(g, Gaussian):
                cov = g.covariance + (2.0 / k) * np.eye(g.dimension)
                closed.append(np.asarray(ball_gauge(Gaussian(cov, scale=g.scale), p, X, q)))
        E = np.array(E)
        finite = np.all(np.isfinite(E))
        viol = np.where(np.isfinite(E[-1]), E[-1] - E[0], np.inf) if finite else np.full(len(X), np.inf)
    details = {"k_list": ks, "errors": E, "gauges": np.array(vals), "reference": base,
               "strict_decrease": bool(finite and np.all(E[-1] < E[0]))}
    if closed:
        details["closed_form"] = np.array(closed)
        details["closed_form_deviation"] = float(np.max(np.abs(np.array(vals) - np.array(closed))
                                                        / np.array(closed)))
    return make_report("mollify_convergence", instance or f"{g.family}, p={float(PIndex.parse(p)):g}",
                       viol, 0.0,
                       lambda i: {"input": _vec(X[i]), "lhs": E[-1, i], "rhs": E[0, i]},
                       None, t.elapsed, details)


def check_boundary_infinity(g: LogConcaveFn, directions, p_list=(-0.5, 1.0),
                            q: QuadratureSpec | None = None, instance: str = "") -> VerificationReport:
    """Directions leaving the support at once (tau = 0) get gauge +inf for every p;
    the others get finite values, which are reported but not tested for convexity."""
    D = np.atleast_2d(np.asarray(directions, dtype=float))
    D = D / np.linalg.norm(D, axis=1, keepdims=True)
    with Timer() as t:
        tau = np.asarray(g.ray_support_end(D), dtype=float)
        G = np.array([np.asarray(ball_gauge(g, p, D, q)).reshape(len(D)) for p in p_list])
        expect_inf = tau <= 0
        wrong = np.where(expect_inf[None, :], np.isfinite(G), ~np.isfinite(G))
        viol = wrong.any(axis=0).astype(float)
    return make_report("boundary_infinity", instance or g.family, viol, 0.0,
                       lambda i: {"input": _vec(D[i]), "lhs": G[:, i],
                                  "rhs": "inf" if expect_inf[i] else "finite"},
                       None, t.elapsed,
                       {"p_list": list(p_list), "support_end": tau, "gauges": G})


def gaussian_gauge_oracle(p, sigma: float = 1.0) -> float:
    """Reciprocal radius of K_p of the standard Gaussian with variance sigma^2."""
    return 1.0 / gaussian_radius(float(PIndex.parse(p)), sigma)


__all__ = [
    "check_subadditivity", "check_directional_convexity", "check_H_inequality",
    "check_det_inequality", "check_prekopa_marginal", "check_monotonicity",
    "check_ip_properties", "check_limits", "check_mollify_convergence",
    "check_boundary_infinity", "gaussian_gauge_oracle", "radial_samples",
]
