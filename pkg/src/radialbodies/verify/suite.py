"""Run a JSON list of checks and collect their reports."""

from __future__ import annotations

import numpy as np

from ..ballbody import PIndex, StarGauge, ball_gauge, euclidean_gauge
from ..geometry import DirectionGrid
from ..io import InputError, parse_body, parse_function
from ..logconcave import CovariogramFn, RayProfile
from . import checks
from .smooth2d import smooth2d_from_spec

DEFAULT_TOL = {
    "subadditivity": 1e-5, "H_inequality": 1e-6, "det_inequality": 1e-6,
    "prekopa_marginal": 1e-9, "monotonicity": 1e-7, "limits": 0.01, "ip_properties": 1e-9,
}


def _function(inst: dict):
    if "body" in inst:
        return CovariogramFn(parse_body(inst["body"], "instance.body"))
    if "function" in inst:
        return parse_function(inst["function"], "instance.function")
    raise InputError("instance: needs 'body' or 'function'")


def _gauge(inst: dict) -> StarGauge:
    if inst.get("gauge") == "euclidean":
        return euclidean_gauge(int(inst.get("dimension", 2)), float(inst.get("radius", 1.0)))
    g = _function(inst)
    p = PIndex.parse(inst.get("p", 1))
    return StarGauge(g.dimension, lambda X: ball_gauge(g, p, X), label=_describe(inst))


def _describe(inst: dict) -> str:
    keep = {k: v for k, v in inst.items() if k not in ("u", "theta", "probes", "directions")}
    return ", ".join(f"{k}={_short(v)}" for k, v in sorted(keep.items()))


def _short(v):
    if isinstance(v, dict):
        return v.get("type") or v.get("family") or v.get("kind") or ("covariogram" if "covariogram" in v else "{...}")
    return v


def _profile(spec: dict) -> RayProfile:
    kind = spec.get("kind")
    if kind == "indicator":
        R = float(spec.get("R", 1.0))
        return RayProfile.from_callable(lambda r: (r <= R) * 1.0, R)
    if kind == "exponential":
        c = float(spec.get("c", 1.0))
        return RayProfile.from_callable(lambda r: np.exp(-c * r))
    if kind == "tent":
        R = float(spec.get("R", 1.0))
        return RayProfile.from_callable(lambda r: np.maximum(1 - r / R, 0.0), R)
    raise InputError(f"instance.profile: unknown kind {kind!r}")


def run_check(entry: dict, seed: int, tol: float | None = None):
    name = entry.get("check")
    inst = dict(entry.get("instance", {}))
    tol = tol if tol is not None else entry.get("tolerance", DEFAULT_TOL.get(name))
    label = entry.get("label") or _describe(inst)
    kw = {} if tol is None else {"tol": float(tol)}
    if name == "subadditivity":
        return checks.check_subadditivity(_gauge(inst), int(inst.get("pairs", 10_000)), seed,
                                          instance=label, **kw)
    if name == "directional_convexity":
        G = _gauge(inst)
        rng = np.random.default_rng(seed)
        m = int(inst.get("probes", 16))
        U = np.asarray(inst["u"], float) if "u" in inst else rng.standard_normal((m, G.dimension))
        T = np.asarray(inst["theta"], float) if "theta" in inst else rng.standard_normal((m, G.dimension))
        return checks.check_directional_convexity(G, U, T, float(inst.get("h", 1e-3)), instance=label)
    if name == "H_inequality":
        g = _function(inst)
        rng = np.random.default_rng(seed)
        u = np.asarray(inst["u"], float) if "u" in inst else rng.standard_normal(g.dimension) * 0.5
        th = np.asarray(inst["theta"], float) if "theta" in inst else rng.standard_normal(g.dimension)
        return checks.check_H_inequality(g, inst["p"], u, th, instance=label, **kw)
    if name == "det_inequality":
        return checks.check_det_inequality(smooth2d_from_spec(inst["f"]), inst["p"], **kw)
    if name == "prekopa_marginal":
        return checks.check_prekopa_marginal(smooth2d_from_spec(inst["f"]),
                                             inst.get("a_grid", [0.0, 0.5, 1.0]),
                                             float(inst.get("p", 1.0)), **kw)
    if name == "monotonicity":
        g = _function(inst)
        grid = DirectionGrid.make(g.dimension, int(inst.get("grid", 64)), seed=seed)
        return checks.check_monotonicity(g, inst["p_list"], grid, instance=label, **kw)
    if name == "limits":
        K = parse_body(inst["body"], "instance.body")
        grid = DirectionGrid.make(K.dimension, int(inst.get("grid", 64)), seed=seed)
        return checks.check_limits(K, grid, instance=label, **kw)
    if name == "mollify_convergence":
        g = _function(inst)
        return checks.check_mollify_convergence(g, inst["p"], inst.get("k_list", [4, 16, 64, 256]),
                                                inst["probes"], instance=label)
    if name == "ip_properties":
        return checks.check_ip_properties(_profile(inst["profile"]), inst["p_list"],
                                          instance=label, **kw)
    if name == "boundary_infinity":
        g = _function(inst)
        return checks.check_boundary_infinity(g, inst["directions"], inst.get("p_list", [-0.5, 1.0]),
                                              instance=label)
    raise InputError(f"unknown check {name!r}")


def entry_seed(base: int, index: int) -> int:
    """Independent per-entry seed derived from (base, index)."""
    return int(np.random.SeedSequence([base, index]).generate_state(1)[0])


def run_suite(entries, seed: int | None = None, tol: float | None = None):
    """Reports for a suite, ordered by check name (ties keep suite order).

    With ``seed`` given, every entry gets a seed derived from (seed, index);
    otherwise each entry's own ``seed`` (default 0) is used.  ``tol``
    replaces every entry's tolerance.
    """
    if isinstance(entries, dict):
        entries = entries.get("checks")
    if not isinstance(entries, list):
        raise InputError("suite: expected a list of checks (or {'checks': [...]})")
    reports = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or "check" not in entry:
            raise InputError(f"suite[{i}]: missing field 'check'")
        s = entry_seed(seed, i) if seed is not None else int(entry.get("seed", 0))
        try:
            rep = run_check(entry, s, tol)
        except InputError as e:
            raise InputError(f"suite[{i}]: {e}") from None
        except KeyError as e:
            raise InputError(f"suite[{i}].instance: missing field {e.args[0]!r}") from None
        rep.seed = s
        reports.append(rep)
    order = sorted(range(len(reports)), key=lambda i: (reports[i].check, i))
    return [reports[i] for i in order]
