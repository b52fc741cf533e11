import numpy as np
import pytest

from edgecount import Graph


def random_graph(rng, n_nodes, n_edges=None, p=None):
    """Uniform random simple graph (edge set sampled without replacement)."""
    iu, iv = np.triu_indices(n_nodes, k=1)
    max_pairs = len(iu)
    if n_edges is None:
        if p is None:
            p = 0.4
        mask = rng.random(max_pairs) < p
        pick = np.flatnonzero(mask)
    else:
        pick = rng.choice(max_pairs, size=min(n_edges, max_pairs), replace=False)
    return Graph(n_nodes, np.column_stack([iu[pick], iv[pick]]))


def named_small_graphs():
    """The usual suspects on <= 8 nodes, keyed by name."""
    k4 = [(a, b) for a in range(4) for b in range(a + 1, 4)]
    k5 = [(a, b) for a in range(5) for b in range(a + 1, 5)]
    return {
        "path3": Graph(3, [(0, 1), (1, 2)]),
        "path4": Graph(4, [(0, 1), (1, 2), (2, 3)]),
        "cycle4": Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
        "cycle6": Graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]),
        "star4": Graph(4, [(0, 1), (0, 2), (0, 3)]),
        "star7": Graph(7, [(0, j) for j in range(1, 7)]),
        "k4": Graph(4, k4),
        "k5": Graph(5, k5),
        "cube": Graph(8, [(0, 1), (1, 2), (2, 3), (0, 3),
                          (4, 5), (5, 6), (6, 7), (4, 7),
                          (0, 4), (1, 5), (2, 6), (3, 7)]),
        "bowtie": Graph(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]),
    }


@pytest.fixture
def rng():
    return np.random.default_rng(20240801)


@pytest.fixture
def small_graphs():
    return named_small_graphs()
