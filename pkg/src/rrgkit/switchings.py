"""Double switchings and exact couplings of a graph with its edge-conditioned law.

A switching at (v1,...,v6) deletes edges v2v3, v4v5, v6v1 and adds v1v2,
v3v4, v5v6; it preserves the degree sequence.  Over an enumerated state
space, weighting switchings by multiplicity and adding heavy identity edges
yields a bipartite graph between all d-regular graphs and those containing
a fixed edge uv; completing it to a biregular graph gives a coupling whose
one-step walk maps the uniform law exactly onto the uniform law conditioned
on the edge uv being present.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Tuple

import numpy as np

from .graphs import AdjacencyMatrix, linear_form
from .rng import as_generator
from .samplers import enumerate_regular
from . import samplers

__all__ = [
    "Switching",
    "SwitchingCounts",
    "CouplingGraph",
    "CouplingFamily",
    "is_valid_switching",
    "apply_switching",
    "inverse_switching",
    "count_switchings",
    "switching_count_bounds",
    "build_coupling_graph",
    "sample_conditional",
    "coupled_sizebias_pair",
]


@dataclass(frozen=True)
class Switching:
    """Six-vertex rewiring; vertices need not all be distinct."""

    v1: int
    v2: int
    v3: int
    v4: int
    v5: int
    v6: int

    def vertices(self) -> Tuple[int, ...]:
        return (self.v1, self.v2, self.v3, self.v4, self.v5, self.v6)


@dataclass(frozen=True)
class SwitchingCounts:
    """s_uv counts valid (u,v,.,.,.,.) switchings; t_uv counts (u,.,.,.,.,v)."""

    s_uv: int
    t_uv: int


def is_valid_switching(A: AdjacencyMatrix, sw: Switching) -> bool:
    """Check the three edge, three non-edge, and three inequality conditions."""
    a = A.a
    v1, v2, v3, v4, v5, v6 = sw.vertices()
    if v1 == v2 or v3 == v4 or v5 == v6:
        return False
    return (
        a[v2, v3] == 1
        and a[v4, v5] == 1
        and a[v6, v1] == 1
        and a[v1, v2] == 0
        and a[v3, v4] == 0
        and a[v5, v6] == 0
    )


def apply_switching(A: AdjacencyMatrix, sw: Switching) -> AdjacencyMatrix:
    """Apply a valid switching; the result is simple with the same degrees."""
    if not is_valid_switching(A, sw):
        raise ValueError(f"{sw} is not a valid switching for this graph")
    b = A.a.copy()
    v1, v2, v3, v4, v5, v6 = sw.vertices()
    for x, y in ((v2, v3), (v4, v5), (v6, v1)):
        b[x, y] = 0
        b[y, x] = 0
    for x, y in ((v1, v2), (v3, v4), (v5, v6)):
        b[x, y] = 1
        b[y, x] = 1
    return AdjacencyMatrix(b)


def inverse_switching(sw: Switching) -> Switching:
    """The switching that undoes sw: (v1, v6, v5, v4, v3, v2)."""
    return Switching(sw.v1, sw.v6, sw.v5, sw.v4, sw.v3, sw.v2)


def _iter_head_switchings(A: AdjacencyMatrix, u: int, v: int):
    """Valid switchings of the form (u, v, ., ., ., .), requiring A_uv = 0.

    Enumerates the frame v6 in N(v1), v3 in N(v2), v5 nonadjacent to v6,
    v4 in N(v5), then filters on full validity.
    """
    a = A.a
    n = A.n
    n1 = np.flatnonzero(a[u]).tolist()
    n2 = np.flatnonzero(a[v]).tolist()
    for v6 in n1:
        nn6 = [w for w in range(n) if w != v6 and a[v6, w] == 0]
        for v3 in n2:
            for v5 in nn6:
                for v4 in np.flatnonzero(a[v5]).tolist():
                    sw = Switching(u, v, v3, v4, v5, v6)
                    if is_valid_switching(A, sw):
                        yield sw


def _iter_tail_switchings(A: AdjacencyMatrix, u: int, v: int):
    """Valid switchings of the form (u, ., ., ., ., v), requiring A_uv = 1."""
    a = A.a
    n = A.n
    nn1 = [w for w in range(n) if w != u and a[u, w] == 0]
    nnv = [w for w in range(n) if w != v and a[v, w] == 0]
    for v2 in nn1:
        for v3 in np.flatnonzero(a[v2]).tolist():
            for v5 in nnv:
                for v4 in np.flatnonzero(a[v5]).tolist():
                    sw = Switching(u, v2, v3, v4, v5, v)
                    if is_valid_switching(A, sw):
                        yield sw


def count_switchings(A: AdjacencyMatrix, u: int, v: int) -> SwitchingCounts:
    """Exact switching counts by enumeration over the proof's candidate frame."""
    if u == v:
        raise ValueError("count_switchings requires u != v")
    if A.a[u, v] == 0:
        s = sum(1 for _ in _iter_head_switchings(A, u, v))
        return SwitchingCounts(s_uv=s, t_uv=0)
    t = sum(1 for _ in _iter_tail_switchings(A, u, v))
    return SwitchingCounts(s_uv=0, t_uv=t)


def switching_count_bounds(n: int, d: int) -> dict:
    """Sandwich bounds for s_uv and t_uv; lower bounds clamp at 0."""
    return {
        "s_low": max(0, d**3 * (n - 2 * d - 2)),
        "s_high": d**3 * (n - d - 1),
        "t_low": max(0, d**2 * (n - d - 1) * (n - 2 * d - 2)),
        "t_high": d**2 * (n - d - 1) ** 2,
    }


# ---------------------------------------------------------------------------
# Coupling graph over enumerated state spaces
# ---------------------------------------------------------------------------


@dataclass
class CouplingGraph:
    """Weighted biregular bipartite graph between all graphs and those with
    edge uv, split into the switching/identity core and completion edges.

    Weights are exact integers (switching multiplicities, the identity
    weight, and integral completion amounts); probability queries are done
    in rational arithmetic.
    """

    n: int
    d: int
    u: int
    v: int
    left: Tuple[AdjacencyMatrix, ...]
    right: Tuple[AdjacencyMatrix, ...]
    weights: Dict[Tuple[int, int], int]
    g0: FrozenSet[Tuple[int, int]]
    left_degree_target: int
    right_degree_target: int

    def left_index(self, A: AdjacencyMatrix) -> int:
        try:
            return self._left_lookup[A.key()]
        except AttributeError:
            self._left_lookup = {g.key(): i for i, g in enumerate(self.left)}
            return self._left_lookup[A.key()]

    def left_degrees(self, core_only: bool = False) -> List[int]:
        out = [0] * len(self.left)
        for (i, j), w in self.weights.items():
            if core_only and (i, j) not in self.g0:
                continue
            out[i] += w
        return out

    def right_degrees(self, core_only: bool = False) -> List[int]:
        out = [0] * len(self.right)
        for (i, j), w in self.weights.items():
            if core_only and (i, j) not in self.g0:
                continue
            out[j] += w
        return out

    def marginal(self) -> List[Fraction]:
        """Exact law of the walk's endpoint when the start is uniform."""
        total_from = Fraction(len(self.left) * self.left_degree_target)
        sums = [Fraction(0)] * len(self.right)
        for (i, j), w in self.weights.items():
            sums[j] += Fraction(w)
        return [s / total_from for s in sums]

    def marginal_tv_from_uniform(self) -> Fraction:
        target = Fraction(1, len(self.right))
        return sum(abs(p - target) for p in self.marginal()) / 2

    def bounded_given_output(self, j: int) -> Fraction:
        """P[core edge traversed | endpoint is right state j], start uniform."""
        core = sum(w for (i, jj), w in self.weights.items() if jj == j and (i, jj) in self.g0)
        full = sum(w for (i, jj), w in self.weights.items() if jj == j)
        return Fraction(core, full)

    def bounded_given_input(self, i: int) -> Fraction:
        core = sum(w for (ii, j), w in self.weights.items() if ii == i and (ii, j) in self.g0)
        return Fraction(core, self.left_degree_target)


def build_coupling_graph(n: int, d: int, u: int, v: int) -> CouplingGraph:
    """Construct the coupling graph exactly over enumerate_regular(n, d).

    Core edges: weight-1-per-switching edges from each graph without uv to
    the results of (u,v,.,.,.,.) switchings, and one identity edge of weight
    d^3(n-d-1) from each graph containing uv to its copy.  The core is then
    completed to exact biregularity by a deterministic greedy pass in
    lexicographic state order.
    """
    if u == v:
        raise ValueError("u and v must differ")
    if d >= n - 1:
        raise ValueError("coupling graph is degenerate for d >= n-1")
    left = enumerate_regular(n, d)
    if not left:
        raise samplers.InfeasibleError(f"no ({n},{d}) graphs to couple")
    right = tuple(A for A in left if A.a[u, v] == 1)
    right_lookup = {A.key(): j for j, A in enumerate(right)}
    lt = d**3 * (n - d - 1)
    rt = d**2 * (n - d - 1) * (n - 1)

    weights: Dict[Tuple[int, int], int] = {}
    core = set()
    for i, A in enumerate(left):
        if A.a[u, v] == 1:
            j = right_lookup[A.key()]
            weights[(i, j)] = weights.get((i, j), 0) + lt
            core.add((i, j))
        else:
            for sw in _iter_head_switchings(A, u, v):
                B = apply_switching(A, sw)
                j = right_lookup[B.key()]
                weights[(i, j)] = weights.get((i, j), 0) + 1
                core.add((i, j))

    # Greedy completion: left states in lexicographic order, each deficit
    # assigned to the least right states with remaining capacity.
    right_load = [0] * len(right)
    for (i, j), w in weights.items():
        right_load[j] += w
    left_load = [0] * len(left)
    for (i, j), w in weights.items():
        left_load[i] += w
    for i in range(len(left)):
        deficit = lt - left_load[i]
        if deficit < 0:
            raise RuntimeError("core degree exceeds biregular target (bug)")
        j = 0
        while deficit > 0:
            if j >= len(right):
                raise RuntimeError("completion ran out of capacity (bug)")
            room = rt - right_load[j]
            if room <= 0:
                j += 1
                continue
            add = min(room, deficit)
            weights[(i, j)] = weights.get((i, j), 0) + add
            right_load[j] += add
            deficit -= add

    cg = CouplingGraph(
        n=n,
        d=d,
        u=u,
        v=v,
        left=left,
        right=right,
        weights=dict(weights),
        g0=frozenset(core),
        left_degree_target=lt,
        right_degree_target=rt,
    )
    if cg.left_degrees() != [lt] * len(left) or cg.right_degrees() != [rt] * len(right):
        raise RuntimeError("completion failed to reach biregularity (bug)")
    return cg


class CouplingFamily:
    """Lazy cache of coupling graphs for all vertex pairs of one (n, d)."""

    def __init__(self, n: int, d: int):
        self.n = n
        self.d = d
        self._cache: Dict[Tuple[int, int], CouplingGraph] = {}

    def get(self, u: int, v: int) -> CouplingGraph:
        if (u, v) not in self._cache:
            self._cache[(u, v)] = build_coupling_graph(self.n, self.d, u, v)
        return self._cache[(u, v)]


def sample_conditional(
    A: AdjacencyMatrix, u: int, v: int, cg: CouplingGraph, rng
) -> Tuple[AdjacencyMatrix, bool]:
    """Walk one weighted edge from A; returns (endpoint, core edge taken).

    When A is uniform over the left class, the endpoint is exactly uniform
    over the graphs containing uv.
    """
    gen = as_generator(rng)
    i = cg.left_index(A)
    entries = sorted((j, w) for (ii, j), w in cg.weights.items() if ii == i)
    cum = np.cumsum([w for _, w in entries])
    r = int(gen.integers(cg.left_degree_target))
    pos = int(np.searchsorted(cum, r, side="right"))
    j = entries[pos][0]
    return cg.right[j], (i, j) in cg.g0


def coupled_sizebias_pair(
    A: AdjacencyMatrix, Q: np.ndarray, cg_family: CouplingFamily, rng
) -> Tuple[float, float, bool]:
    """One draw of the size-biased coupling for f_Q.

    Picks an ordered pair (V1, V2) with probability proportional to its
    coefficient, replaces A by the conditional sample for that pair, and
    returns (f_Q(A), f_Q(A'), core edge taken).  On a core edge the gap
    f_Q(A') - f_Q(A) is at most 6 max(Q).
    """
    gen = as_generator(rng)
    Qa = np.asarray(Q, dtype=np.float64)
    n = Qa.shape[0]
    if np.any(np.diagonal(Qa) != 0):
        raise ValueError("Q must have a zero diagonal")
    total = Qa.sum()
    if total <= 0:
        raise ValueError("Q must have positive total weight")
    flat = gen.choice(n * n, p=(Qa / total).ravel())
    v1, v2 = divmod(int(flat), n)
    cg = cg_family.get(v1, v2)
    B, bounded = sample_conditional(A, v1, v2, cg, gen)
    return linear_form(Qa, A), linear_form(Qa, B), bounded
