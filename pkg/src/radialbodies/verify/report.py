"""Verification reports."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np


def _plain(v):
    """JSON-friendly copy of numpy scalars/arrays and non-finite floats."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


@dataclass
class VerificationReport:
    """Outcome of one check; ``passed`` iff worst_violation <= tolerance."""

    check: str
    instance: str
    worst_violation: float
    tolerance: float
    witnesses: list = field(default_factory=list)
    seed: int | None = None
    runtime: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.worst_violation <= self.tolerance)

    def to_dict(self, timing: bool = False) -> dict:
        d = {"check": self.check, "instance": self.instance, "pass": self.passed,
             "worst_violation": self.worst_violation, "tolerance": self.tolerance,
             "witnesses": self.witnesses, "seed": self.seed, "details": self.details}
        if timing:
            d["runtime"] = self.runtime
        return _plain(d)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return (f"{mark} {self.check} [{self.instance}] worst={self.worst_violation:.3e} "
                f"tol={self.tolerance:.1e}")


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def make_report(check, instance, violations, tolerance, witness, seed=None, runtime=0.0,
                details=None, keep=3) -> VerificationReport:
    """Report from per-probe violations; ``witness(i)`` describes probe i.

    Witnesses are the ``keep`` worst probes (always recorded on failure).
    """
    v = np.atleast_1d(np.asarray(violations, dtype=float))
    v = np.where(np.isnan(v), np.inf, v)
    worst = float(max(v.max(), 0.0)) if len(v) else 0.0
    order = np.argsort(-v, kind="stable")[:keep] if len(v) else []
    wit = [witness(int(i)) for i in order] if worst > tolerance or keep else []
    return VerificationReport(check, instance, worst, float(tolerance), wit, seed, runtime,
                              details or {})
