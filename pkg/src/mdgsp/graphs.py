"""Weighted undirected simple graphs, their matrices, and Cartesian products.

Vertices are contiguous integers 0..n-1. Product-graph vertices (i1, i2)
are flattened lexicographically to n2*i1 + i2, and that single ordering is
used everywhere downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, GraphError


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Graph:
    """Undirected weighted simple graph with dense symmetric weight storage."""

    n: int
    w: np.ndarray  # (n, n) symmetric, zero diagonal, nonnegative

    def weight(self, i: int, j: int) -> float:
        return float(self.w[i, j])

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Unordered edge pairs as sorted (i, j) with i < j."""
        ii, jj = np.nonzero(np.triu(self.w, k=1))
        return list(zip(ii.tolist(), jj.tolist()))

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.w, k=1)))

    def degrees(self) -> np.ndarray:
        return self.w.sum(axis=1)

    def neighbors(self, i: int) -> np.ndarray:
        return np.nonzero(self.w[i])[0]


@dataclass(frozen=True)
class GraphMatrices:
    """Adjacency W, diagonal degree D, and Laplacian L = D - W of one graph."""

    W: np.ndarray
    D: np.ndarray
    L: np.ndarray


@dataclass(frozen=True)
class ProductGraph:
    """Cartesian product of two factor graphs, materialized on V1 x V2."""

    g1: Graph
    g2: Graph
    graph: Graph = field(repr=False)

    @property
    def n1(self) -> int:
        return self.g1.n

    @property
    def n2(self) -> int:
        return self.g2.n

    def vertex_index(self, i1: int, i2: int) -> int:
        """Lexicographic flattening (i1, i2) -> n2*i1 + i2."""
        return self.g2.n * i1 + i2

    def vertex_pair(self, v: int) -> tuple[int, int]:
        return divmod(v, self.g2.n)


def build_graph(n: int, weighted_edges: list[tuple[int, int, float]]) -> Graph:
    """Build a graph from an explicit edge list.

    Each entry is (i, j, w) with 0 <= i, j < n, i != j, w > 0. The pair
    {i, j} may appear at most once in either orientation.
    """
    if n < 1:
        raise GraphError(f"vertex count must be positive, got {n}")
    w = np.zeros((n, n), dtype=np.float64)
    seen: set[tuple[int, int]] = set()
    for i, j, wt in weighted_edges:
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge ({i}, {j}) out of range for n={n}")
        if i == j:
            raise GraphError(f"loop edge at vertex {i} not allowed")
        wt = float(wt)
        if not np.isfinite(wt) or wt <= 0.0:
            raise GraphError(f"edge ({i}, {j}) has nonpositive weight {wt}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphError(f"duplicate edge {key}")
        seen.add(key)
        w[i, j] = wt
        w[j, i] = wt
    return Graph(n=n, w=_freeze(w))


def standard_graph(kind: str, n: int) -> Graph:
    """Unit-weight graph of a named family: path, cycle, wheel, edgeless, complete.

    The wheel places its hub at vertex 0 with a cycle on vertices 1..n-1.
    """
    minima = {"path": 1, "cycle": 3, "wheel": 4, "edgeless": 1, "complete": 1}
    if kind not in minima:
        raise GraphError(f"unknown graph family {kind!r}")
    if n < minima[kind]:
        raise GraphError(f"{kind} graph needs at least {minima[kind]} vertices, got {n}")
    edges: list[tuple[int, int, float]] = []
    if kind == "path":
        edges = [(i, i + 1, 1.0) for i in range(n - 1)]
    elif kind == "cycle":
        edges = [(i, (i + 1) % n, 1.0) for i in range(n)]
    elif kind == "wheel":
        rim = list(range(1, n))
        edges = [(0, r, 1.0) for r in rim]
        edges += [(rim[k], rim[(k + 1) % len(rim)], 1.0) for k in range(len(rim))]
    elif kind == "complete":
        edges = [(i, j, 1.0) for i in range(n) for j in range(i + 1, n)]
    return build_graph(n, edges)


def matrices(g: Graph | ProductGraph) -> GraphMatrices:
    """Adjacency, degree, and Laplacian matrices of a graph.

    For a ProductGraph the matrices are materialized as Kronecker sums of
    the factor matrices, which keeps L(G1 x G2) = L1 (+) L2 exact to the
    last bit (summing the product rows directly can differ by round-off).
    """
    if isinstance(g, ProductGraph):
        m1 = matrices(g.g1)
        m2 = matrices(g.g2)
        return GraphMatrices(
            W=_freeze(kronecker_sum(m1.W, m2.W)),
            D=_freeze(kronecker_sum(m1.D, m2.D)),
            L=_freeze(kronecker_sum(m1.L, m2.L)),
        )
    W = g.w.copy()
    d = W.sum(axis=1)
    D = np.diag(d)
    L = D - W
    return GraphMatrices(W=_freeze(W), D=_freeze(D), L=_freeze(L))


def cartesian_product(g1: Graph, g2: Graph) -> ProductGraph:
    """Cartesian product graph on V1 x V2 in lexicographic vertex order.

    The product weight couples vertices that agree in one coordinate and
    are adjacent in the other, so the product adjacency (and Laplacian)
    is the Kronecker sum of the factors'.
    """
    i1 = np.eye(g1.n)
    i2 = np.eye(g2.n)
    w = np.kron(g1.w, i2) + np.kron(i1, g2.w)
    prod = Graph(n=g1.n * g2.n, w=_freeze(w))
    return ProductGraph(g1=g1, g2=g2, graph=prod)


def kronecker_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """A (+) B = A kron I + I kron B for square A, B."""
    return np.kron(a, np.eye(b.shape[0])) + np.kron(np.eye(a.shape[0]), b)


def hop_distances(g: Graph, start: int) -> np.ndarray:
    """Unweighted BFS hop count from `start`; unreachable vertices get -1."""
    if not (0 <= start < g.n):
        raise GraphError(f"vertex {start} out of range for n={g.n}")
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[start] = 0
    frontier = [start]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for v in frontier:
            for u in g.neighbors(v):
                if dist[u] < 0:
                    dist[u] = d
                    nxt.append(int(u))
        frontier = nxt
    return dist


def graph_to_json(g: Graph) -> str:
    """Serialize as {"n": int, "edges": [[i, j, w], ...]} with edges sorted."""
    payload = {
        "n": g.n,
        "edges": [[i, j, float(g.w[i, j])] for i, j in g.edges],
    }
    return json.dumps(payload, indent=2) + "\n"


def graph_from_json(text: str) -> Graph:
    """Parse and validate the JSON graph format used by the CLI."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid graph JSON: {exc}") from exc
    if not isinstance(payload, dict) or "n" not in payload or "edges" not in payload:
        raise FormatError('graph JSON must be an object with keys "n" and "edges"')
    n = payload["n"]
    edges = payload["edges"]
    if not isinstance(n, int) or not isinstance(edges, list):
        raise FormatError('"n" must be an integer and "edges" a list')
    triples = []
    for entry in edges:
        if not (isinstance(entry, list) and len(entry) == 3):
            raise FormatError(f"edge entry {entry!r} is not an [i, j, w] triple")
        triples.append((entry[0], entry[1], entry[2]))
    try:
        return build_graph(n, triples)
    except GraphError as exc:
        raise FormatError(f"graph JSON violates invariants: {exc}") from exc


def save_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(graph_to_json(g))


def load_graph(path: str | Path) -> Graph:
    return graph_from_json(Path(path).read_text())
