"""Symmetric eigensolver wrapper and spectral-gap statistics.

lambda(A) = max(lambda_2, -lambda_n) is the largest nontrivial eigenvalue
magnitude of a d-regular graph (lambda_1 = d always).  The reference line
2 sqrt(d (1 - d/n)) is the conjectured asymptotic location of lambda.

Eigenvalues come from LAPACK's symmetric solver with a residual
verification pass; a self-contained cyclic Jacobi implementation is kept as
an independent cross-check oracle for small matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .graphs import AdjacencyMatrix, edge_count, regular_degree
from .rng import as_generator

__all__ = [
    "SpectralSummary",
    "eig_sym",
    "jacobi_eigvals",
    "spectral_summary",
    "vu_reference",
    "mixing_check",
    "residual_tolerance",
]


def residual_tolerance(n: int, amax: float) -> float:
    """Uniform tolerance scale 1e-9 * n * max|A| used for eigen-residuals."""
    return 1e-9 * n * max(amax, 1.0)


def _as_symmetric(A) -> np.ndarray:
    m = A.a.astype(np.float64) if isinstance(A, AdjacencyMatrix) else np.asarray(A, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(m, m.T, atol=0.0):
        raise ValueError("matrix must be symmetric")
    return m


def eig_sym(A, verify: bool = True) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, descending.

    With verify=True each eigenpair's residual |Av - lambda v| is checked
    against the uniform tolerance scale.
    """
    m = _as_symmetric(A)
    n = m.shape[0]
    if verify:
        vals, vecs = np.linalg.eigh(m)
        resid = np.abs(m @ vecs - vecs * vals).max() if n else 0.0
        tol = residual_tolerance(n, float(np.abs(m).max()) if n else 1.0)
        if resid > tol:
            raise ArithmeticError(f"eigen residual {resid:g} exceeds tolerance {tol:g}")
    else:
        vals = np.linalg.eigvalsh(m)
    return vals[::-1].copy()


def jacobi_eigvals(A, sweeps: int = 100, tol: float = 1e-12) -> np.ndarray:
    """Cyclic Jacobi eigenvalues (descending); independent oracle for n <= 64."""
    m = _as_symmetric(A).copy()
    n = m.shape[0]
    if n > 64:
        raise ValueError("Jacobi oracle is intended for n <= 64")
    scale = max(float(np.abs(m).max()), 1.0)
    for _ in range(sweeps):
        off = math.sqrt(max(0.0, (m**2).sum() - (np.diagonal(m) ** 2).sum()))
        if off <= tol * scale * n:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(m[p, q]) <= 1e-18 * scale:
                    continue
                theta = 0.5 * math.atan2(2.0 * m[p, q], m[q, q] - m[p, p])
                c, s = math.cos(theta), math.sin(theta)
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                m = rot.T @ m @ rot
    return np.sort(np.diagonal(m))[::-1].copy()


def vu_reference(n: int, d: int) -> float:
    """Reference value 2 sqrt(d (1 - d/n))."""
    return 2.0 * math.sqrt(d * (1.0 - d / n))


@dataclass(frozen=True)
class SpectralSummary:
    n: int
    d: int
    eigenvalues: Tuple[float, ...]
    lam: float
    vu_ref: float

    @property
    def lam_over_sqrt_d(self) -> float:
        return self.lam / math.sqrt(self.d)

    @property
    def lam_over_vu(self) -> float:
        return self.lam / self.vu_ref


def spectral_summary(A: AdjacencyMatrix, d: int | None = None) -> SpectralSummary:
    """Spectrum, lambda(A), and the reference ratios for a regular graph."""
    actual = regular_degree(A)
    if actual is None:
        raise ValueError("spectral_summary requires a regular graph")
    if d is not None and d != actual:
        raise ValueError(f"graph is {actual}-regular, not {d}-regular")
    d = actual
    vals = eig_sym(A)
    lam = max(vals[1], -vals[-1]) if A.n >= 2 else 0.0
    return SpectralSummary(
        n=A.n,
        d=d,
        eigenvalues=tuple(float(v) for v in vals),
        lam=float(lam),
        vu_ref=vu_reference(A.n, d),
    )


def mixing_check(A: AdjacencyMatrix, d: int, trials: int, rng) -> float:
    """Largest sampled deviation ratio |e(S,T) - d|S||T|/n| / sqrt(|S||T|).

    The expander mixing inequality caps this by lambda(A); exceeding it
    (plus the residual tolerance) indicates a bug, so that is asserted here.
    """
    if not np.all(A.a.sum(axis=0) == d):
        raise ValueError("mixing_check requires a d-regular graph")
    gen = as_generator(rng)
    n = A.n
    lam = spectral_summary(A, d).lam
    tol = residual_tolerance(n, float(A.a.max()))
    worst = 0.0
    for _ in range(trials):
        smask = gen.random(n) < gen.random()
        tmask = gen.random(n) < gen.random()
        S = np.flatnonzero(smask)
        T = np.flatnonzero(tmask)
        if S.size == 0 or T.size == 0:
            continue
        dev = abs(edge_count(A, S, T) - d * S.size * T.size / n) / math.sqrt(S.size * T.size)
        worst = max(worst, dev)
    if worst > lam + tol:
        raise AssertionError(
            f"mixing deviation {worst:g} exceeds lambda {lam:g} (+tol); "
            "eigensolver or edge counting is wrong"
        )
    return worst
