import itertools
import math

import numpy as np
import pytest
from scipy.stats import chisquare

from conftest import complete_graph, cycle_graph
from rrgkit import _kernels
from rrgkit.graphs import AdjacencyMatrix, degrees, is_regular
from rrgkit.rng import RngStream
from rrgkit.samplers import (
    GraphModel,
    InfeasibleError,
    enumerate_regular,
    permutation_to_adjacency,
    sample,
    sample_er,
    sample_fpf_involution,
    sample_long_cycle,
    sample_permutation_model,
    sample_uniform_simple,
    _sample_switching_chain,
)

CHI2_P = 0.001


def chi2_p_uniform(counts):
    return chisquare(counts).pvalue


class TestGraphModel:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(kind="uniform", n=4, d=2),  # n < 5
            dict(kind="uniform", n=5, d=3),  # nd odd
            dict(kind="uniform", n=5, d=5),  # d > n-1
            dict(kind="perm-uniform", n=6, d=3),  # odd d
            dict(kind="perm-involution", n=5, d=2),  # odd n
            dict(kind="er", n=5, p=1.5),
            dict(kind="nope", n=5, d=2),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            GraphModel(**kwargs)

    def test_valid(self):
        GraphModel("uniform", 6, 3)
        GraphModel("perm-longcycle", 5, 4)
        GraphModel("er", 5, p=0.25)


class TestEnumeration:
    @pytest.mark.parametrize(
        "n,d,count", [(4, 2, 3), (5, 2, 12), (5, 4, 1), (6, 3, 70), (7, 4, 465), (7, 2, 465)]
    )
    def test_counts(self, n, d, count):
        graphs = enumerate_regular(n, d)
        assert len(graphs) == count
        assert all(is_regular(A, d) and not A.multigraph for A in graphs)

    def test_k5_unique(self):
        assert enumerate_regular(5, 4)[0] == complete_graph(5)

    def test_lexicographic_order_and_uniqueness(self):
        keys = [A.key() for A in enumerate_regular(6, 3)]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)

    def test_infeasible_n(self):
        with pytest.raises(InfeasibleError):
            enumerate_regular(11, 2)

    def test_odd_product_is_empty(self):
        assert enumerate_regular(5, 3) == ()


class TestUniformSampler:
    def test_k5_always(self):
        gen = RngStream(0).generator()
        assert all(sample_uniform_simple(5, 4, gen) == complete_graph(5) for _ in range(20))

    def test_cycle_frequencies(self):
        # 12 labeled 2-regular graphs on 5 vertices, each ~1/12 of 12000 draws
        gen = RngStream(101).generator()
        graphs = {A.key(): i for i, A in enumerate(enumerate_regular(5, 2))}
        counts = np.zeros(12)
        for _ in range(12000):
            counts[graphs[sample_uniform_simple(5, 2, gen).key()]] += 1
        expected = 1000.0
        sigma = math.sqrt(12000 * (1 / 12) * (11 / 12))
        assert np.all(np.abs(counts - expected) <= 3 * sigma)

    def test_enumeration_path_chi2(self):
        gen = RngStream(202).generator()
        graphs = {A.key(): i for i, A in enumerate(enumerate_regular(6, 3))}
        counts = np.zeros(70)
        for _ in range(10**5):
            counts[graphs[sample_uniform_simple(6, 3, gen).key()]] += 1
        assert chi2_p_uniform(counts) > CHI2_P

    def test_edge_probability(self):
        # P[A_uv = 1] = d/(n-1) for the uniform model
        n, d, reps = 8, 3, 10**4
        gen = RngStream(303).generator()
        hits = sum(int(sample_uniform_simple(n, d, gen).a[0, 1]) for _ in range(reps))
        p = d / (n - 1)
        assert abs(hits / reps - p) <= 3 * math.sqrt(p * (1 - p) / reps)

    @pytest.mark.parametrize("n,d", [(20, 3), (30, 3), (12, 4), (16, 5), (40, 5)])
    def test_outputs_regular_simple(self, n, d):
        gen = RngStream(404).generator()
        for _ in range(10):
            A = sample_uniform_simple(n, d, gen)
            assert is_regular(A, d) and not A.multigraph

    def test_switching_chain_distribution(self):
        # force the chain path on an enumerable case and compare to uniform
        gen = RngStream(505).generator()
        graphs = {A.key(): i for i, A in enumerate(enumerate_regular(7, 4))}
        counts = np.zeros(465)
        for _ in range(2 * 10**4):
            A = _sample_switching_chain(7, 4, gen, burn_in_factor=50)
            counts[graphs[A.key()]] += 1
        assert chi2_p_uniform(counts) > CHI2_P

    def test_switching_chain_stationarity(self):
        # a fixed proposal count must preserve the uniform law exactly;
        # this catches accept-count stopping bias
        graphs = enumerate_regular(7, 4)
        lookup = {A.key(): i for i, A in enumerate(graphs)}
        gen = RngStream(606).generator()
        counts = np.zeros(465)
        for _ in range(2 * 10**4):
            A0 = graphs[int(gen.integers(465))]
            adj = A0.a.astype(np.uint8).copy()
            us, vs = np.nonzero(np.triu(adj))
            _kernels.edge_switch_chain(
                adj, us.astype(np.int64), vs.astype(np.int64), 3, int(gen.integers(2**32 - 1))
            )
            counts[lookup[AdjacencyMatrix(adj.astype(np.int64)).key()]] += 1
        assert chi2_p_uniform(counts) > CHI2_P

    def test_determinism(self):
        for n, d in [(6, 3), (20, 3), (12, 4)]:
            a = [sample_uniform_simple(n, d, RngStream(9, i).generator()).key() for i in range(3)]
            b = [sample_uniform_simple(n, d, RngStream(9, i).generator()).key() for i in range(3)]
            assert a == b
        assert (
            sample_uniform_simple(12, 4, RngStream(9, 0).generator()).key()
            != sample_uniform_simple(12, 4, RngStream(9, 1).generator()).key()
        )


class TestPermutationSamplers:
    def test_fpf_involution_basics(self):
        gen = RngStream(1).generator()
        assert list(sample_fpf_involution(2, gen)) == [1, 0]
        for n in (4, 6, 10):
            pi = sample_fpf_involution(n, gen)
            assert np.all(pi[pi] == np.arange(n)) and np.all(pi != np.arange(n))
        with pytest.raises(ValueError):
            sample_fpf_involution(5, gen)

    def test_fpf_involution_n4_uniform(self):
        gen = RngStream(2).generator()
        counts = {}
        for _ in range(3000):
            key = tuple(sample_fpf_involution(4, gen))
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 3
        sigma = math.sqrt(3000 * (1 / 3) * (2 / 3))
        assert all(abs(c - 1000) <= 3 * sigma for c in counts.values())

    def test_fpf_involution_n6_chi2(self):
        gen = RngStream(3).generator()
        counts = {}
        for _ in range(15000):
            key = tuple(sample_fpf_involution(6, gen))
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 15  # 5!! = 15
        assert chi2_p_uniform(list(counts.values())) > CHI2_P

    def test_long_cycle_basics(self):
        gen = RngStream(4).generator()
        assert list(sample_long_cycle(2, gen)) == [1, 0]
        twos = {tuple(sample_long_cycle(3, gen)) for _ in range(100)}
        assert twos == {(1, 2, 0), (2, 0, 1)}

    def test_long_cycle_n4_chi2(self):
        gen = RngStream(5).generator()
        counts = {}
        for _ in range(12000):
            key = tuple(sample_long_cycle(4, gen))
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 6  # (4-1)! = 6
        assert chi2_p_uniform(list(counts.values())) > CHI2_P

    def test_identity_permutation_gives_loops(self):
        A = permutation_to_adjacency([np.arange(6)])
        assert np.all(np.diagonal(A.a) == 2)
        assert A.a.sum() == 12

    def test_cycle_permutation_gives_cycle_graph(self):
        n = 7
        pi = np.roll(np.arange(n), -1)
        assert np.array_equal(permutation_to_adjacency([pi]).a, cycle_graph(n).a)

    def test_involution_gives_parallel_edges(self):
        gen = RngStream(6).generator()
        pi = sample_fpf_involution(8, gen)
        A = permutation_to_adjacency([pi])
        for u in range(8):
            assert A.a[u, pi[u]] == 2

    def test_model_degrees(self):
        gen = RngStream(7).generator()
        for kind in ("perm-uniform", "perm-involution", "perm-longcycle"):
            A = sample(GraphModel(kind, 10, 6), gen)
            assert np.all(degrees(A) == 6)

    def test_fpf_models_zero_diagonal_and_edge_mean(self):
        n, d, reps = 12, 4, 4000
        for kind in ("perm-involution", "perm-longcycle"):
            gen = RngStream(8).generator()
            total = 0.0
            for _ in range(reps):
                A = sample(GraphModel(kind, n, d), gen)
                assert np.all(np.diagonal(A.a) == 0)
                total += A.a[0, 1]
            mean = total / reps
            p = d / (n - 1)
            # crude 3-sigma envelope treating entries as Bernoulli-scale
            assert abs(mean - p) <= 3 * math.sqrt(p / reps) + 0.02


class TestErdosRenyi:
    def test_extremes(self):
        gen = RngStream(9).generator()
        assert sample_er(6, 0.0, gen).a.sum() == 0
        assert sample_er(6, 1.0, gen) == complete_graph(6)

    def test_mean_edge_count(self):
        gen = RngStream(10).generator()
        reps = 10**4
        edges = [sample_er(20, 0.5, gen).a.sum() // 2 for _ in range(reps)]
        m = 190  # C(20, 2)
        sigma = math.sqrt(m * 0.25)
        assert abs(np.mean(edges) - 95.0) <= 3 * sigma / math.sqrt(reps)

    def test_rejects_bad_p(self):
        with pytest.raises(ValueError):
            sample_er(5, -0.1, RngStream(0).generator())
