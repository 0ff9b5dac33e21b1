"""Samplers for every graph model, plus exhaustive enumeration oracles.

Models
------
uniform           uniform simple d-regular graph on n vertices
perm-uniform      symmetrized sum of d/2 uniform permutation matrices
perm-involution   same with uniform fixed-point-free involutions
perm-longcycle    same with uniform single-n-cycle permutations
er                Erdos-Renyi G(n, p)

The uniform sampler is exactly uniform on the enumeration path (n <= 8,
via the enumeration oracle) and on the configuration-model rejection path
(small d); otherwise it falls back to a long double-edge-swap chain started
from a circulant graph, which is only approximately uniform.  The burn-in
factor of the chain is a knob; no rigorous mixing bound is claimed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from . import _kernels
from .graphs import AdjacencyMatrix, complement
from .rng import as_generator, kernel_seed

__all__ = [
    "GraphModel",
    "SamplerError",
    "InfeasibleError",
    "MODEL_KINDS",
    "sample",
    "sample_uniform_simple",
    "sample_permutation_model",
    "sample_fpf_involution",
    "sample_long_cycle",
    "sample_er",
    "enumerate_regular",
    "permutation_to_adjacency",
]

MODEL_KINDS = ("uniform", "perm-uniform", "perm-involution", "perm-longcycle", "er")

# Dispatch thresholds for the uniform sampler.
ENUMERATION_MAX_N = 8
CONFIG_GATE_COEFF = 1.0
CONFIG_GATE_FLOOR = 3
CONFIG_RETRY_CAP = 10**6
DEFAULT_BURN_IN_FACTOR = 100

# Hard ceiling for the enumeration oracle; beyond ~10 vertices the number of
# labeled regular graphs is out of reach for exhaustive lists.
ENUMERATE_MAX_N = 10
ENUMERATE_MAX_GRAPHS = 2 * 10**6


class SamplerError(RuntimeError):
    """Raised when a sampler cannot produce a graph within its budget."""


class InfeasibleError(ValueError):
    """Raised when an exhaustive construction is out of practical reach."""


@dataclass(frozen=True)
class GraphModel:
    """A graph distribution: kind plus its (n, d) or (n, p) parameters."""

    kind: str
    n: int
    d: int = 0
    p: Optional[float] = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.kind == "er":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError("er model needs edge probability p in [0, 1]")
            return
        if self.kind == "uniform":
            if self.n < 5:
                raise ValueError("uniform model requires n >= 5")
            if not 1 <= self.d <= self.n - 1:
                raise ValueError("uniform model requires 1 <= d <= n-1")
            if (self.n * self.d) % 2 != 0:
                raise ValueError("uniform model requires n*d even")
            return
        # permutation models
        if self.d < 2 or self.d % 2 != 0:
            raise ValueError("permutation models require even d >= 2")
        if self.kind == "perm-involution" and self.n % 2 != 0:
            raise ValueError("fixed-point-free involutions require even n")

    @property
    def is_multigraph(self) -> bool:
        return self.kind.startswith("perm")


def sample(model: GraphModel, rng, **kwargs) -> AdjacencyMatrix:
    gen = as_generator(rng)
    if model.kind == "uniform":
        return sample_uniform_simple(model.n, model.d, gen, **kwargs)
    if model.kind == "er":
        return sample_er(model.n, model.p, gen)
    perm_kind = {
        "perm-uniform": "uniform",
        "perm-involution": "fpf_involution",
        "perm-longcycle": "long_cycle",
    }[model.kind]
    return sample_permutation_model(model.n, model.d, perm_kind, gen)


# ---------------------------------------------------------------------------
# Uniform simple d-regular graphs
# ---------------------------------------------------------------------------


def sample_uniform_simple(
    n: int,
    d: int,
    rng,
    burn_in_factor: int = DEFAULT_BURN_IN_FACTOR,
) -> AdjacencyMatrix:
    """Sample a uniform (or documented approximately-uniform) d-regular graph.

    Paths, in order: exact enumeration sampling (n <= 8), configuration-model
    rejection (small d; exactly uniform conditioned on simplicity), and the
    switching chain (approximate).  Complementation maps d to n-1-d when that
    makes a cheaper exact path available.
    """
    GraphModel("uniform", n, d)
    gen = as_generator(rng)
    flip = (n - 1 - d) < d
    d_eff = n - 1 - d if flip else d
    if d_eff == 0:
        A = AdjacencyMatrix(np.zeros((n, n), dtype=np.int64))
        return complement(A) if flip else A
    if n <= ENUMERATION_MAX_N:
        graphs = enumerate_regular(n, d_eff)
        A = graphs[int(gen.integers(len(graphs)))]
    elif d_eff <= max(CONFIG_GATE_FLOOR, CONFIG_GATE_COEFF * n ** (1.0 / 3.0)):
        A = _sample_configuration_rejection(n, d_eff, gen)
    else:
        A = _sample_switching_chain(n, d_eff, gen, burn_in_factor)
    return complement(A) if flip else A


def _sample_configuration_rejection(n: int, d: int, gen) -> AdjacencyMatrix:
    """Pair half-edges uniformly; reject until the multigraph is simple."""
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(CONFIG_RETRY_CAP):
        perm = gen.permutation(stubs)
        u = perm[0::2]
        v = perm[1::2]
        if np.any(u == v):
            continue
        key = np.minimum(u, v) * n + np.maximum(u, v)
        if np.unique(key).size != key.size:
            continue
        a = np.zeros((n, n), dtype=np.int64)
        a[u, v] = 1
        a[v, u] = 1
        return AdjacencyMatrix(a)
    raise SamplerError(
        f"configuration model produced no simple graph for (n={n}, d={d}) "
        f"within {CONFIG_RETRY_CAP} attempts"
    )


def _circulant_regular(n: int, d: int) -> np.ndarray:
    """Deterministic simple d-regular start state for the switching chain."""
    a = np.zeros((n, n), dtype=np.uint8)
    offsets = list(range(1, d // 2 + 1))
    if d % 2 == 1:
        offsets.append(n // 2)  # n is even when d is odd
    for off in offsets:
        idx = np.arange(n)
        a[idx, (idx + off) % n] = 1
        a[(idx + off) % n, idx] = 1
    return a


def _sample_switching_chain(n: int, d: int, gen, burn_in_factor: int) -> AdjacencyMatrix:
    # A fixed proposal count keeps the uniform law exactly stationary;
    # the factor 2 keeps the accepted-swap budget near burn_in_factor*n*d
    # at typical acceptance rates.
    adj = _circulant_regular(n, d)
    us, vs = np.nonzero(np.triu(adj))
    eu = us.astype(np.int64)
    ev = vs.astype(np.int64)
    proposals = 2 * burn_in_factor * n * d
    _kernels.edge_switch_chain(adj, eu, ev, proposals, kernel_seed(gen))
    return AdjacencyMatrix(adj.astype(np.int64))


# ---------------------------------------------------------------------------
# Permutation models
# ---------------------------------------------------------------------------


def permutation_to_adjacency(perms) -> AdjacencyMatrix:
    """Symmetrized sum of permutation matrices; loops land on the diagonal
    with weight 2 per fixed point."""
    perms = [np.asarray(p, dtype=np.int64) for p in perms]
    n = perms[0].shape[0]
    a = np.zeros((n, n), dtype=np.int64)
    idx = np.arange(n)
    for p in perms:
        np.add.at(a, (idx, p), 1)
        np.add.at(a, (p, idx), 1)
    return AdjacencyMatrix(a, multigraph=True)


def sample_permutation_model(n: int, d: int, perm_kind: str, rng) -> AdjacencyMatrix:
    if d < 2 or d % 2 != 0:
        raise ValueError("permutation models require even d >= 2")
    gen = as_generator(rng)
    samplers = {
        "uniform": lambda: gen.permutation(n),
        "fpf_involution": lambda: sample_fpf_involution(n, gen),
        "long_cycle": lambda: sample_long_cycle(n, gen),
    }
    if perm_kind not in samplers:
        raise ValueError(f"unknown permutation kind {perm_kind!r}")
    return permutation_to_adjacency([samplers[perm_kind]() for _ in range(d // 2)])


def sample_fpf_involution(n: int, rng) -> np.ndarray:
    """Uniform fixed-point-free involution (uniform perfect matching)."""
    if n % 2 != 0:
        raise ValueError("fixed-point-free involutions require even n")
    gen = as_generator(rng)
    order = gen.permutation(n)
    pi = np.empty(n, dtype=np.int64)
    pi[order[0::2]] = order[1::2]
    pi[order[1::2]] = order[0::2]
    return pi


def sample_long_cycle(n: int, rng) -> np.ndarray:
    """Uniform permutation with a single length-n cycle."""
    if n < 2:
        raise ValueError("long cycles require n >= 2")
    gen = as_generator(rng)
    order = gen.permutation(n)
    pi = np.empty(n, dtype=np.int64)
    pi[order] = np.roll(order, -1)
    return pi


# ---------------------------------------------------------------------------
# Erdos-Renyi
# ---------------------------------------------------------------------------


def sample_er(n: int, p: float, rng) -> AdjacencyMatrix:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    gen = as_generator(rng)
    a = np.zeros((n, n), dtype=np.int64)
    iu = np.triu_indices(n, k=1)
    bits = (gen.random(iu[0].size) < p).astype(np.int64)
    a[iu] = bits
    a[(iu[1], iu[0])] = bits
    return AdjacencyMatrix(a)


# ---------------------------------------------------------------------------
# Exhaustive enumeration oracle
# ---------------------------------------------------------------------------


def enumerate_regular(n: int, d: int) -> tuple:
    """All labeled simple d-regular graphs on n vertices, sorted by the
    upper-triangle adjacency bitstring.

    Exhaustive; practical only for n <= 10, and within that range only when
    the count is manageable (a hard cap guards against cases like (10, 4)
    with ~7e7 graphs).
    """
    if n > ENUMERATE_MAX_N:
        raise InfeasibleError(f"enumeration infeasible for n={n} > {ENUMERATE_MAX_N}")
    if not 0 <= d <= n - 1:
        return ()
    return _enumerate_cached(n, d)


@lru_cache(maxsize=None)
def _enumerate_cached(n: int, d: int) -> tuple:
    if (n * d) % 2 != 0:
        return ()
    if n - 1 - d < d:
        comp = _enumerate_cached(n, n - 1 - d)
        graphs = [complement(A) for A in comp]
    else:
        graphs = [AdjacencyMatrix(a) for a in _enumerate_backtrack(n, d)]
    graphs.sort(key=lambda A: A.key())
    return tuple(graphs)


def _enumerate_backtrack(n: int, d: int):
    """Row-by-row backtracking over residual degrees."""
    out = []
    a = np.zeros((n, n), dtype=np.int64)
    residual = [d] * n

    def extend(u: int):
        if u == n:
            out.append(a.copy())
            return
        r = residual[u]
        if r == 0:
            extend(u + 1)
            return
        candidates = [v for v in range(u + 1, n) if residual[v] > 0]
        if len(candidates) < r:
            return
        for chosen in itertools.combinations(candidates, r):
            for v in chosen:
                a[u, v] = a[v, u] = 1
                residual[v] -= 1
            residual[u] = 0
            # Remaining stubs must suffice for every later vertex.
            if all(
                residual[v] <= sum(1 for w in range(u + 1, n) if w != v and residual[w] > 0)
                for v in range(u + 1, n)
            ):
                extend(u + 1)
            residual[u] = r
            for v in chosen:
                a[u, v] = a[v, u] = 0
                residual[v] += 1
            if len(out) > ENUMERATE_MAX_GRAPHS:
                raise InfeasibleError(
                    f"enumeration of (n={n}, d={d}) exceeds {ENUMERATE_MAX_GRAPHS} graphs"
                )

    extend(0)
    return out
