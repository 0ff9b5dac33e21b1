import numpy as np
import pytest
from hypothesis import settings

from rrgkit.graphs import AdjacencyMatrix

settings.register_profile("ci", deadline=None, derandomize=True, max_examples=50)
settings.load_profile("ci")


def cycle_graph(n: int) -> AdjacencyMatrix:
    a = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        a[i, (i + 1) % n] = 1
        a[(i + 1) % n, i] = 1
    return AdjacencyMatrix(a)


def complete_graph(n: int) -> AdjacencyMatrix:
    return AdjacencyMatrix(np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64))


def petersen_graph() -> AdjacencyMatrix:
    a = np.zeros((10, 10), dtype=np.int64)
    for i in range(5):
        for u, v in ((i, (i + 1) % 5), (i, i + 5), (5 + i, 5 + (i + 2) % 5)):
            a[u, v] = 1
            a[v, u] = 1
    return AdjacencyMatrix(a)


@pytest.fixture
def c5():
    return cycle_graph(5)


@pytest.fixture
def k5():
    return complete_graph(5)


@pytest.fixture
def petersen():
    return petersen_graph()
