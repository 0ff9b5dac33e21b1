"""Empirical tail reports with one-sided confidence limits.

A bound "holds empirically" when at every grid point the bound is at least
the one-sided 99% lower confidence limit of the empirical tail probability;
since the bounds under test are true inequalities, raw empirical exceedance
would be a false alarm.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.stats import beta

__all__ = ["TailReport", "clopper_pearson_lower", "clopper_pearson_upper", "compare_to_bound"]

DEFAULT_CONFIDENCE = 0.99


def clopper_pearson_lower(k: int, m: int, confidence: float = DEFAULT_CONFIDENCE) -> float:
    """One-sided lower confidence limit for a binomial proportion."""
    if k <= 0:
        return 0.0
    return float(beta.ppf(1.0 - confidence, k, m - k + 1))


def clopper_pearson_upper(k: int, m: int, confidence: float = DEFAULT_CONFIDENCE) -> float:
    """One-sided upper confidence limit for a binomial proportion."""
    if k >= m:
        return 1.0
    return float(beta.ppf(confidence, k + 1, m - k))


@dataclass
class TailReport:
    """Empirical CCDF versus a theoretical bound curve on a threshold grid."""

    name: str
    side: str  # "upper" or "lower"
    center: float
    grid: List[float]
    empirical_ccdf: List[float]
    lower_cl: List[float]
    upper_cl: List[float]
    bound_curve: List[float]
    violations: List[int]
    reps: int
    meta: dict = field(default_factory=dict)

    def holds(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "side": self.side,
            "center": self.center,
            "grid": list(self.grid),
            "empirical_ccdf": list(self.empirical_ccdf),
            "lower_cl": list(self.lower_cl),
            "upper_cl": list(self.upper_cl),
            "bound_curve": list(self.bound_curve),
            "violations": list(self.violations),
            "reps": self.reps,
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, payload: dict) -> "TailReport":
        return cls(**payload)


def compare_to_bound(
    name: str,
    side: str,
    center: float,
    samples: np.ndarray,
    grid,
    bound_curve,
    confidence: float = DEFAULT_CONFIDENCE,
    meta: dict | None = None,
) -> TailReport:
    """Build a TailReport for P[X >= center + t] (upper) or P[X <= center - t]."""
    samples = np.asarray(samples, dtype=np.float64)
    m = samples.size
    grid = [float(t) for t in grid]
    bound_curve = [float(b) for b in bound_curve]
    emp, lcl, ucl, violations = [], [], [], []
    for idx, t in enumerate(grid):
        if side == "upper":
            k = int(np.count_nonzero(samples >= center + t))
        elif side == "lower":
            k = int(np.count_nonzero(samples <= center - t))
        else:
            raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
        emp.append(k / m)
        lo = clopper_pearson_lower(k, m, confidence)
        hi = clopper_pearson_upper(k, m, confidence)
        lcl.append(lo)
        ucl.append(hi)
        if lo > bound_curve[idx]:
            violations.append(idx)
    return TailReport(
        name=name,
        side=side,
        center=float(center),
        grid=grid,
        empirical_ccdf=emp,
        lower_cl=lcl,
        upper_cl=ucl,
        bound_curve=bound_curve,
        violations=violations,
        reps=m,
        meta=meta or {},
    )
