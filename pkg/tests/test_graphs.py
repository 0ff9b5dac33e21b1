import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import complete_graph, cycle_graph
from rrgkit.graphs import (
    AdjacencyMatrix,
    GraphFormatError,
    complement,
    degree,
    edge_count,
    is_regular,
    linear_form,
    linear_form_stats,
    nonneighbors,
    read_graph,
    set_pair_matrix,
    write_graph,
)
from rrgkit.rng import RngStream
from rrgkit.samplers import enumerate_regular, sample_uniform_simple


class TestAdjacencyMatrix:
    def test_rejects_asymmetry(self):
        with pytest.raises(ValueError, match="symmetric"):
            AdjacencyMatrix([[0, 1], [0, 0]])

    def test_rejects_negative(self):
        with pytest.raises(ValueError, match="nonnegative"):
            AdjacencyMatrix([[0, -1], [-1, 0]])

    def test_simple_rejects_loops_and_multiedges(self):
        with pytest.raises(ValueError, match="loops"):
            AdjacencyMatrix([[2, 0], [0, 0]])
        with pytest.raises(ValueError, match="parallel"):
            AdjacencyMatrix([[0, 2], [2, 0]])

    def test_multigraph_allows_both(self):
        A = AdjacencyMatrix([[2, 3], [3, 0]], multigraph=True)
        assert degree(A, 0) == 5

    def test_immutable(self):
        A = complete_graph(3)
        with pytest.raises(ValueError):
            A.a[0, 1] = 0


def test_degree_examples(k5, c5):
    assert all(degree(k5, v) == 4 for v in range(5))
    assert degree(c5, 0) == 2
    loop = AdjacencyMatrix([[2, 0], [0, 0]], multigraph=True)
    assert degree(loop, 0) == 2  # a loop counts twice
    with pytest.raises(IndexError):
        degree(k5, 5)


def test_is_regular_examples(k5, c5):
    assert is_regular(k5, 4)
    assert not is_regular(c5, 3)
    assert all(is_regular(A, 3) for A in enumerate_regular(6, 3))


def test_edge_count_examples(k5, c5):
    assert edge_count(k5, range(5), range(5)) == 5 * 4
    # 5-cycle 1-2-3-4-5-1, S={1,2}, T={2,3}: entries (1,2),(1,3),(2,2),(2,3)
    assert edge_count(c5, {0, 1}, {1, 2}) == 2
    assert edge_count(c5, (), range(5)) == 0
    assert edge_count(c5, {0, 1}, {1, 2}) == edge_count(c5, {1, 2}, {0, 1})


def test_edge_count_matches_set_pair_form():
    gen = RngStream(7734).generator()
    for _ in range(1000):
        n = int(gen.integers(5, 12))
        d = int(gen.integers(1, n - 1))
        if (n * d) % 2:
            d += 1
        if d > n - 1:
            continue
        A = sample_uniform_simple(n, d, gen)
        S = [int(v) for v in np.flatnonzero(gen.random(n) < 0.5)]
        T = [int(v) for v in np.flatnonzero(gen.random(n) < 0.5)]
        q = set_pair_matrix(n, S, T)
        assert edge_count(A, S, T) == round(linear_form(q, A))


def test_linear_form_examples(k5):
    assert linear_form(np.ones((5, 5)), k5) == 20.0
    assert linear_form(np.zeros((5, 5)), k5) == 0.0
    with pytest.raises(ValueError, match="shape"):
        linear_form(np.ones((4, 4)), k5)


@given(
    a=st.floats(-5, 5, allow_nan=False),
    b=st.floats(-5, 5, allow_nan=False),
    seed=st.integers(0, 2**20),
)
def test_linear_form_linearity(a, b, seed):
    gen = RngStream(seed).generator()
    n = 6
    q1 = gen.random((n, n))
    q1 = q1 + q1.T
    q2 = gen.random((n, n))
    q2 = q2 + q2.T
    M = enumerate_regular(6, 3)[int(gen.integers(70))]
    lhs = linear_form(a * q1 + b * q2, M)
    rhs = a * linear_form(q1, M) + b * linear_form(q2, M)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs), abs(rhs))


def test_linear_form_stats_uniform_model():
    n, d = 10, 3
    em = np.full((n, n), d / (n - 1))
    np.fill_diagonal(em, 0.0)
    q = np.ones((n, n)) - np.eye(n)
    stats = linear_form_stats(q, em)
    assert stats.mu == pytest.approx(n * d, rel=1e-12)
    assert stats.sigma_tilde_sq == pytest.approx(n * d, rel=1e-12)
    assert stats.a == 1.0


def test_linear_form_stats_permutation_model():
    n, d = 8, 4
    em = np.full((n, n), d / n)
    stats = linear_form_stats(np.ones((n, n)), em)
    assert stats.mu == pytest.approx(n * d, rel=1e-12)


def test_linear_form_stats_zero():
    stats = linear_form_stats(np.zeros((4, 4)), np.zeros((4, 4)))
    assert (stats.mu, stats.sigma_tilde_sq, stats.a) == (0.0, 0.0, 0.0)


def test_linear_form_stats_rejects_negative_mean_matrix():
    with pytest.raises(ValueError, match="nonnegative"):
        linear_form_stats(np.ones((2, 2)), -np.ones((2, 2)))


def test_nonneighbors(k5, c5):
    assert nonneighbors(k5, 0) == frozenset()
    assert nonneighbors(c5, 0) == {2, 3}
    edgeless = AdjacencyMatrix(np.zeros((6, 6), dtype=np.int64))
    assert nonneighbors(edgeless, 2) == set(range(6)) - {2}


def test_nonneighbors_size_invariant():
    gen = RngStream(11).generator()
    for n, d in [(8, 3), (10, 4), (12, 5)]:
        A = sample_uniform_simple(n, d, gen)
        assert all(len(nonneighbors(A, v)) == n - d - 1 for v in range(n))


def test_complement_roundtrip(c5):
    assert complement(complement(c5)) == c5


class TestGraphFile:
    def test_roundtrip(self, tmp_path, petersen):
        path = tmp_path / "g.txt"
        write_graph(path, petersen)
        assert read_graph(path) == petersen
        head = path.read_text().splitlines()[0]
        assert head == "10 3 0"

    def test_multigraph_roundtrip(self, tmp_path):
        A = AdjacencyMatrix([[2, 3, 0], [3, 0, 1], [0, 1, 2]], multigraph=True)
        path = tmp_path / "m.txt"
        write_graph(path, A)
        assert read_graph(path) == A

    def test_rejects_out_of_range(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 -1 0\n1 4 1\n")
        with pytest.raises(GraphFormatError, match="out of range"):
            read_graph(path)

    def test_rejects_conflicting_duplicates(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 -1 0\n1 2 1\n2 1 1\n")
        with pytest.raises(GraphFormatError, match="duplicate"):
            read_graph(path)

    def test_rejects_declared_degree_mismatch(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 2 0\n1 2 1\n")
        with pytest.raises(GraphFormatError, match="regular"):
            read_graph(path)

    def test_rejects_loop_in_simple(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 -1 0\n1 1 2\n")
        with pytest.raises(GraphFormatError, match="loop"):
            read_graph(path)
