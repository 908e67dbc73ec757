"""Shared fixtures-in-spirit: random graph/signal generators for tests."""

import numpy as np

from mdgsp import build_graph, eigenbasis, matrices


def random_graph(rng, n, p=0.6, weighted=True):
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                w = rng.uniform(0.2, 3.0) if weighted else 1.0
                edges.append((i, j, w))
    return build_graph(n, edges)


def random_connected_graph(rng, n, extra=0.4, weighted=True):
    """Spanning chain plus random extra edges, so the graph is connected."""
    edges = []
    for i in range(n - 1):
        w = rng.uniform(0.2, 3.0) if weighted else 1.0
        edges.append((i, i + 1, w))
    for i in range(n):
        for j in range(i + 2, n):
            if rng.random() < extra:
                w = rng.uniform(0.2, 3.0) if weighted else 1.0
                edges.append((i, j, w))
    return build_graph(n, edges)


def laplacian_basis(g):
    return eigenbasis(matrices(g).L, "laplacian")


def distinct_spectrum_graph(rng, n, tries=50):
    """Random connected weighted graph whose Laplacian spectrum is distinct."""
    for _ in range(tries):
        g = random_connected_graph(rng, n)
        values = laplacian_basis(g).values
        if np.diff(values).min() > 1e-6:
            return g
    raise AssertionError("could not draw a distinct-spectrum graph")
