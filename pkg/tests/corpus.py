"""Shared random graph corpus for the graph tests and the acceptance suite."""

import numpy as np

from bobw_graphs import graph as G


def fuzz_corpus(n=300, seed=2024, max_k=10):
    """Random adjacency matrices, self-loops present with probability 1/2."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        k = int(rng.integers(2, max_k + 1))
        p = rng.uniform(0.1, 0.7)
        adj = rng.random((k, k)) < p
        np.fill_diagonal(adj, rng.random(k) < 0.5)
        out.append(G.FeedbackGraph.from_adjacency(adj))
    return out
