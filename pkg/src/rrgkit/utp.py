"""Uniform-tails-property parameters, tail bounds, and permutation couplings.

A random symmetric nonnegative matrix M has the uniform tails property with
constants (c0, gamma0) when every linear form with coefficients in [0, a]
satisfies

    P[f_Q(M) >= (1+gamma0) mu + t], P[f_Q(M) <= (1-gamma0) mu - t]
        <= exp(-c0 (sigma~^2 / a^2) h(a t / sigma~^2)),

with mu and sigma~^2 the mean and variance proxy of the form.  The three
models implemented here carry explicit constants: (1/4, 0) for the uniform
permutation model, (1/8, 0) for conjugation-invariant fixed-point-free
permutations, and ((1/6)(1-(d+1)/(n-1)), (d+1)/(n-d-2)) for the uniform
model.  Sharper centered bounds for the uniform model concentrate around
mu/p and p'mu with p = 1-(d+1)/(n-1) and p' = 1-(d+1)/(n-d-1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .graphs import LinearFormStats, linear_form, linear_form_stats, set_pair_matrix
from .reports import TailReport, compare_to_bound
from .rng import as_generator
from .samplers import GraphModel, sample
from .sizebias import bennett_h

__all__ = [
    "UtpParams",
    "DiscrepancyTailParams",
    "utp_params",
    "utp_bound",
    "utp_bound_bernstein",
    "expected_adjacency",
    "thm_p_upper",
    "thm_p_lower",
    "linear_form_tail_bounds",
    "edge_discrepancy_mu",
    "edge_discrepancy_bounds",
    "coupled_perm_uniform",
    "coupled_perm_conjinv",
    "q_matrix",
    "Q_KINDS",
    "mc_tail_report",
]


@dataclass(frozen=True)
class UtpParams:
    c0: float
    gamma0: float

    def __post_init__(self):
        if self.c0 <= 0:
            raise ValueError("c0 must be positive")
        if self.gamma0 < 0:
            raise ValueError("gamma0 must be nonnegative")


@dataclass(frozen=True)
class DiscrepancyTailParams:
    """Success probabilities and mean for the centered uniform-model bounds."""

    p_upper: float
    p_lower: float
    mu: float


def thm_p_upper(n: int, d: int) -> Fraction:
    """p = 1 - (d+1)/(n-1), governing the upper-tail center mu/p."""
    return 1 - Fraction(d + 1, n - 1)


def thm_p_lower(n: int, d: int) -> Fraction:
    """p' = 1 - (d+1)/(n-d-1), governing the lower-tail center p'mu."""
    return 1 - Fraction(d + 1, n - d - 1)


def utp_params(model: GraphModel) -> UtpParams:
    """Explicit UTP constants for each supported model."""
    if model.kind == "perm-uniform":
        return UtpParams(0.25, 0.0)
    if model.kind in ("perm-involution", "perm-longcycle"):
        return UtpParams(0.125, 0.0)
    if model.kind == "uniform":
        n, d = model.n, model.d
        if n - d - 2 <= 0:
            raise ValueError(f"uniform-model constants need n-d-2 > 0, got n={n}, d={d}")
        c0 = Fraction(1, 6) * thm_p_upper(n, d)
        gamma0 = Fraction(d + 1, n - d - 2)
        return UtpParams(float(c0), float(gamma0))
    raise ValueError(f"no uniform-tails constants for model kind {model.kind!r}")


def utp_bound(params: UtpParams, stats: LinearFormStats, t: float) -> float:
    """The h-form tail bound for one side at deviation t > 0."""
    if t <= 0:
        raise ValueError("t must be positive")
    if stats.a <= 0 or stats.sigma_tilde_sq <= 0:
        raise ValueError("degenerate statistics: need a > 0 and sigma~^2 > 0")
    s2, a = stats.sigma_tilde_sq, stats.a
    return math.exp(-params.c0 * (s2 / a**2) * bennett_h(a * t / s2))


def utp_bound_bernstein(params: UtpParams, stats: LinearFormStats, t: float) -> float:
    """Two-sided Bernstein-style companion: 2 exp(-c0 t^2 / (2(sigma~^2 + at/3)))."""
    if t <= 0:
        raise ValueError("t must be positive")
    if stats.a <= 0 or stats.sigma_tilde_sq <= 0:
        raise ValueError("degenerate statistics: need a > 0 and sigma~^2 > 0")
    s2, a = stats.sigma_tilde_sq, stats.a
    return 2.0 * math.exp(-params.c0 * t * t / (2.0 * (s2 + a * t / 3.0)))


def expected_adjacency(model: GraphModel) -> np.ndarray:
    """Exact expected adjacency matrix of the model.

    Uniform permutations have d/n everywhere (including the diagonal, from
    fixed points); the uniform and fixed-point-free models have d/(n-1) off
    the diagonal and zero on it.
    """
    n = model.n
    if model.kind == "perm-uniform":
        return np.full((n, n), model.d / n)
    if model.kind in ("uniform", "perm-involution", "perm-longcycle"):
        em = np.full((n, n), model.d / (n - 1))
        np.fill_diagonal(em, 0.0)
        return em
    if model.kind == "er":
        em = np.full((n, n), model.p)
        np.fill_diagonal(em, 0.0)
        return em
    raise ValueError(f"unknown model kind {model.kind!r}")


def linear_form_tail_bounds(
    n: int, d: int, stats: LinearFormStats, t: float
) -> Tuple[float, float]:
    """Centered uniform-model bounds for a [0,a]-coefficient linear form.

    Returns (upper, lower): bounds on P[f_Q(A) - mu/p >= t] and on
    P[f_Q(A) - p'mu <= -t].
    """
    if n < 5:
        raise ValueError("requires n >= 5")
    if t < 0:
        raise ValueError("t must be nonnegative")
    p = float(thm_p_upper(n, d))
    pp = float(thm_p_lower(n, d))
    if pp <= 0:
        raise ValueError(f"lower-tail constant p' <= 0 for n={n}, d={d}")
    s2, a = stats.sigma_tilde_sq, stats.a
    if a <= 0 or s2 <= 0:
        raise ValueError("degenerate statistics: need a > 0 and sigma~^2 > 0")
    upper = math.exp(-(s2 / (6.0 * p * a * a)) * bennett_h(p * a * t / s2))
    lower = math.exp(-(s2 / (6.0 * a * a)) * bennett_h(a * t / s2))
    return upper, lower


def edge_discrepancy_mu(n: int, d: int, S, T) -> float:
    """Expected edge count between S and T in the uniform model."""
    S, T = set(S), set(T)
    return (len(S) * len(T) - len(S & T)) * d / (n - 1)


def edge_discrepancy_bounds(
    n: int, d: int, S, T, t: float
) -> Tuple[Optional[float], Optional[float]]:
    """Edge-count concentration for the uniform model at ratio t.

    Returns (upper, lower): upper bounds P[e_A(S,T) >= t mu / p] for t >= 1,
    lower bounds P[e_A(S,T) <= t p' mu] for 0 < t <= 1; the out-of-domain
    side is None.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    mu = edge_discrepancy_mu(n, d, S, T)
    if mu <= 0:
        raise ValueError("mu must be positive (S and T must span at least one pair)")
    p = float(thm_p_upper(n, d))
    pp = float(thm_p_lower(n, d))
    upper = math.exp(-(mu / (2.0 * p)) * bennett_h(t - 1.0)) if t >= 1.0 else None
    lower = None
    if t <= 1.0 and pp > 0:
        lower = math.exp(-(pp * mu / 2.0) * bennett_h(t - 1.0))
    return upper, lower


# ---------------------------------------------------------------------------
# Explicit permutation couplings
# ---------------------------------------------------------------------------


def coupled_perm_uniform(pi: np.ndarray, u: int, v: int) -> np.ndarray:
    """Compose with the transposition of pi(u) and v.

    If pi is uniform, the output is uniform conditioned on mapping u to v.
    """
    pi = np.asarray(pi, dtype=np.int64)
    out = pi.copy()
    a = pi[u]
    if a == v:
        return out
    j = int(np.flatnonzero(pi == v)[0])
    out[u] = v
    out[j] = a
    return out


def coupled_perm_conjinv(pi: np.ndarray, u: int, v: int) -> np.ndarray:
    """Conjugate by the transposition (u, pi^{-1}(v)).

    Preserves the cycle type, so a law that is uniform on a fixed-point-free
    conjugacy class maps to the same law conditioned on u -> v.
    """
    pi = np.asarray(pi, dtype=np.int64)
    if u == v:
        raise ValueError("u and v must differ")
    if np.any(pi == np.arange(pi.size)):
        raise ValueError("permutation must be fixed point free")
    if pi[u] == v:
        return pi.copy()
    w = int(np.flatnonzero(pi == v)[0])
    tau = np.arange(pi.size)
    tau[u], tau[w] = w, u
    return tau[pi[tau]]


# ---------------------------------------------------------------------------
# Monte Carlo validation harness
# ---------------------------------------------------------------------------

Q_KINDS = ("random", "setpair", "light")


def q_matrix(kind: str, n: int, d: int, rng) -> np.ndarray:
    """Test coefficient matrices: random symmetric in [0,1], a set-pair
    indicator, or the positive light part of a random unit Rayleigh vector."""
    gen = as_generator(rng)
    if kind == "random":
        q = gen.random((n, n))
        q = (q + q.T) / 2.0
        np.fill_diagonal(q, 0.0)
        return q
    if kind == "setpair":
        return set_pair_matrix(n, range(0, n // 3), range(n // 3, 2 * (n // 3)))
    if kind == "light":
        from .ks import light_heavy_split

        x = gen.normal(size=n)
        x -= x.mean()
        x /= np.linalg.norm(x)
        return np.maximum(light_heavy_split(x, max(d, 1)).L, 0.0)
    raise ValueError(f"unknown Q class {kind!r}; choose from {Q_KINDS}")


def _sample_forms(model: GraphModel, Q: np.ndarray, reps: int, gen) -> np.ndarray:
    vals = np.empty(reps)
    for r in range(reps):
        vals[r] = linear_form(Q, sample(model, gen))
    return vals


def mc_tail_report(model: GraphModel, Q, t_grid, reps: int, rng) -> TailReport:
    """Empirical two-sided tails of f_Q versus the model's UTP bound curve.

    The upper side tests P[f >= (1+gamma0) mu + t], the lower side
    P[f <= (1-gamma0) mu - t]; a violation at a grid point means the lower
    confidence limit exceeded the bound there.
    """
    if reps < 100:
        raise ValueError("reps must be at least 100")
    gen = as_generator(rng)
    Qa = np.asarray(Q, dtype=np.float64)
    params = utp_params(model)
    stats = linear_form_stats(Qa, expected_adjacency(model))
    samples = _sample_forms(model, Qa, reps, gen)
    if stats.a == 0:  # zero form: nothing to bound
        grid = [float(t) for t in t_grid]
        return TailReport(
            name=f"utp.{model.kind}",
            side="upper",
            center=0.0,
            grid=grid,
            empirical_ccdf=[0.0] * len(grid),
            lower_cl=[0.0] * len(grid),
            upper_cl=[1.0] * len(grid),
            bound_curve=[1.0] * len(grid),
            violations=[],
            reps=reps,
            meta={"mu": 0.0, "degenerate": True},
        )
    curve = [utp_bound(params, stats, t) for t in t_grid]
    upper = compare_to_bound(
        f"utp.{model.kind}.upper",
        "upper",
        (1.0 + params.gamma0) * stats.mu,
        samples,
        t_grid,
        curve,
        meta={
            "mu": stats.mu,
            "sigma_tilde_sq": stats.sigma_tilde_sq,
            "a": stats.a,
            "c0": params.c0,
            "gamma0": params.gamma0,
        },
    )
    lower = compare_to_bound(
        f"utp.{model.kind}.lower",
        "lower",
        (1.0 - params.gamma0) * stats.mu,
        samples,
        t_grid,
        curve,
    )
    upper.meta["lower_report"] = lower.to_dict()
    upper.meta["lower_holds"] = lower.holds()
    return upper
