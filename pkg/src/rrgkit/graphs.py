"""Graph data model, edge counts, and linear-form statistics.

Adjacency matrices are symmetric nonnegative integer matrices.  A loop is
stored as a diagonal entry and contributes that entry (which counts it
twice) to the degree of its vertex.  Simple graphs have a zero diagonal and
entries in {0, 1}.

Vertices are 0-indexed throughout the Python API; the graph file format and
the CLI use 1-indexed labels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "AdjacencyMatrix",
    "GraphFormatError",
    "LinearFormStats",
    "degree",
    "degrees",
    "is_regular",
    "edge_count",
    "linear_form",
    "linear_form_stats",
    "nonneighbors",
    "neighbors",
    "complement",
    "set_pair_matrix",
    "read_graph",
    "write_graph",
]

# Above this size, linear forms switch from a plain dot product to fsum to
# keep rounding under control.
_FSUM_THRESHOLD = 1000


class GraphFormatError(ValueError):
    """Raised when a graph file violates the format contract."""


class AdjacencyMatrix:
    """Immutable symmetric nonnegative integer adjacency matrix.

    ``multigraph=False`` additionally enforces a zero diagonal and 0/1
    entries.  The underlying array is exposed read-only as ``.a``.
    """

    __slots__ = ("_a", "multigraph")

    def __init__(self, entries, multigraph: bool = False):
        a = np.asarray(entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency matrix must be square, got shape {a.shape}")
        if not np.issubdtype(a.dtype, np.integer):
            if not np.all(a == np.round(a)):
                raise ValueError("adjacency entries must be integers")
            a = a.astype(np.int64)
        else:
            a = a.astype(np.int64, copy=True)
        if np.any(a < 0):
            raise ValueError("adjacency entries must be nonnegative")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency matrix must be symmetric")
        if not multigraph:
            if np.any(np.diagonal(a) != 0):
                raise ValueError("simple graph cannot have loops")
            if np.any(a > 1):
                raise ValueError("simple graph cannot have parallel edges")
        a.setflags(write=False)
        object.__setattr__(self, "_a", a)
        object.__setattr__(self, "multigraph", bool(multigraph))

    def __setattr__(self, name, value):
        raise AttributeError("AdjacencyMatrix is immutable")

    @property
    def n(self) -> int:
        return self._a.shape[0]

    @property
    def a(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._a

    def key(self) -> bytes:
        """Canonical byte string (upper triangle, row major) for hashing."""
        iu = np.triu_indices(self.n)
        return self._a[iu].astype(np.int64).tobytes()

    def __eq__(self, other):
        return (
            isinstance(other, AdjacencyMatrix)
            and self.multigraph == other.multigraph
            and np.array_equal(self._a, other._a)
        )

    def __hash__(self):
        return hash((self.multigraph, self.key()))

    def __repr__(self):
        kind = "multigraph" if self.multigraph else "graph"
        return f"AdjacencyMatrix(n={self.n}, {kind})"


@dataclass(frozen=True)
class LinearFormStats:
    """Mean and variance proxy of a bounded-coefficient linear form.

    mu is the expected value of the form, sigma_tilde_sq the expectation of
    the entrywise-squared form, and a the largest coefficient.
    """

    mu: float
    sigma_tilde_sq: float
    a: float


def _check_vertex(A: AdjacencyMatrix, v: int) -> int:
    v = int(v)
    if not 0 <= v < A.n:
        raise IndexError(f"vertex {v} out of range for n={A.n}")
    return v


def _check_vertex_set(A: AdjacencyMatrix, S: Iterable[int]) -> np.ndarray:
    idx = np.fromiter((int(v) for v in S), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= A.n):
        raise IndexError(f"vertex set not contained in range(0, {A.n})")
    if idx.size != len(set(idx.tolist())):
        raise ValueError("vertex set contains duplicates")
    return idx


def degree(A: AdjacencyMatrix, v: int) -> int:
    """Sum of all edge weights at v; a loop contributes its diagonal entry."""
    v = _check_vertex(A, v)
    return int(A.a[:, v].sum())


def degrees(A: AdjacencyMatrix) -> np.ndarray:
    return A.a.sum(axis=0)


def is_regular(A: AdjacencyMatrix, d: int) -> bool:
    return bool(np.all(degrees(A) == d))


def regular_degree(A: AdjacencyMatrix):
    """Common degree if A is regular, else None."""
    degs = degrees(A)
    if A.n == 0:
        return None
    d = int(degs[0])
    return d if np.all(degs == d) else None


def neighbors(A: AdjacencyMatrix, v: int) -> np.ndarray:
    v = _check_vertex(A, v)
    return np.flatnonzero(A.a[v] > 0)


def nonneighbors(A: AdjacencyMatrix, v: int) -> frozenset:
    """Vertices that are neither v nor adjacent to it (simple graphs)."""
    if A.multigraph:
        raise ValueError("nonneighbors is defined for simple graphs")
    v = _check_vertex(A, v)
    mask = A.a[v] == 0
    mask[v] = False
    return frozenset(np.flatnonzero(mask).tolist())


def edge_count(A: AdjacencyMatrix, S: Iterable[int], T: Iterable[int]) -> int:
    """Sum of A[u][v] over u in S, v in T (edges inside S∩T count twice)."""
    si = _check_vertex_set(A, S)
    ti = _check_vertex_set(A, T)
    if si.size == 0 or ti.size == 0:
        return 0
    return int(A.a[np.ix_(si, ti)].sum())


def _form_sum(values: np.ndarray) -> float:
    if values.shape[0] > _FSUM_THRESHOLD:
        return math.fsum(values.ravel())
    return float(values.sum())


def linear_form(Q: np.ndarray, M) -> float:
    """f_Q(M) = sum over u,v of Q[u][v] * M[u][v]."""
    Qa = np.asarray(Q, dtype=np.float64)
    Ma = M.a if isinstance(M, AdjacencyMatrix) else np.asarray(M)
    if Qa.shape != Ma.shape:
        raise ValueError(f"shape mismatch: Q {Qa.shape} vs M {Ma.shape}")
    return _form_sum(Qa * Ma)


def linear_form_stats(Q: np.ndarray, EM: np.ndarray) -> LinearFormStats:
    """Statistics of f_Q under a model with expected adjacency matrix EM."""
    Qa = np.asarray(Q, dtype=np.float64)
    EMa = np.asarray(EM, dtype=np.float64)
    if Qa.shape != EMa.shape:
        raise ValueError(f"shape mismatch: Q {Qa.shape} vs EM {EMa.shape}")
    if np.any(EMa < 0):
        raise ValueError("expected adjacency matrix must be entrywise nonnegative")
    mu = _form_sum(Qa * EMa)
    sig2 = _form_sum(Qa * Qa * EMa)
    a = float(Qa.max()) if Qa.size else 0.0
    return LinearFormStats(mu=mu, sigma_tilde_sq=sig2, a=a)


def set_pair_matrix(n: int, S: Iterable[int], T: Iterable[int]) -> np.ndarray:
    """Symmetric 0/1/2-halves matrix Q with f_Q(A) = edge_count(A, S, T)."""
    s = np.zeros(n)
    t = np.zeros(n)
    s[list(S)] = 1.0
    t[list(T)] = 1.0
    return 0.5 * (np.outer(s, t) + np.outer(t, s))


def complement(A: AdjacencyMatrix) -> AdjacencyMatrix:
    """Complement of a simple graph."""
    if A.multigraph:
        raise ValueError("complement is defined for simple graphs")
    b = 1 - A.a
    np.fill_diagonal(b, 0)
    return AdjacencyMatrix(b)


# ---------------------------------------------------------------------------
# Graph file format: first line "n d multigraph_flag", then one line "u v w"
# per unordered edge with 1-indexed endpoints; loops appear once with their
# diagonal weight.  d is the regular degree, or -1 for irregular graphs.
# ---------------------------------------------------------------------------


def write_graph(path, A: AdjacencyMatrix) -> None:
    d = regular_degree(A)
    lines = [f"{A.n} {-1 if d is None else d} {int(A.multigraph)}"]
    for u in range(A.n):
        for v in range(u, A.n):
            w = int(A.a[u, v])
            if w:
                lines.append(f"{u + 1} {v + 1} {w}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_graph(path) -> AdjacencyMatrix:
    with open(path) as fh:
        raw = [ln.strip() for ln in fh]
    rows = [ln for ln in raw if ln and not ln.startswith("#")]
    if not rows:
        raise GraphFormatError("empty graph file")
    head = rows[0].split()
    if len(head) != 3:
        raise GraphFormatError(f"bad header {rows[0]!r}; expected 'n d multigraph_flag'")
    try:
        n, d, mflag = int(head[0]), int(head[1]), int(head[2])
    except ValueError as exc:
        raise GraphFormatError(f"bad header {rows[0]!r}") from exc
    if n < 1 or mflag not in (0, 1):
        raise GraphFormatError(f"bad header values n={n}, multigraph_flag={mflag}")
    a = np.zeros((n, n), dtype=np.int64)
    seen = set()
    for ln in rows[1:]:
        parts = ln.split()
        if len(parts) == 2:
            parts.append("1")
        if len(parts) != 3:
            raise GraphFormatError(f"bad edge line {ln!r}")
        u, v, w = (int(p) for p in parts)
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphFormatError(f"vertex label out of range in line {ln!r}")
        if w < 1:
            raise GraphFormatError(f"nonpositive weight in line {ln!r}")
        pair = (min(u, v), max(u, v))
        if pair in seen:
            raise GraphFormatError(f"conflicting duplicate edge {pair} (asymmetry)")
        seen.add(pair)
        u -= 1
        v -= 1
        a[u, v] = w
        a[v, u] = w
    try:
        A = AdjacencyMatrix(a, multigraph=bool(mflag))
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc
    if d >= 0 and not is_regular(A, d):
        raise GraphFormatError(f"header declares d={d} but graph is not {d}-regular")
    return A
