"""Small graph families used by the tests, the acceptance suite and the CLI demos."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .graph import Graph, Partition


def k2(w: float = 1.0) -> Graph:
    return Graph.from_edges(2, [(0, 1, w)])


def path(n: int, w: float = 1.0) -> Graph:
    return Graph.from_edges(n, [(i, i + 1, w) for i in range(n - 1)])


def star(leaves: int, w: float = 1.0) -> Graph:
    """Hub 0 joined to vertices 1..leaves."""
    return Graph.from_edges(leaves + 1, [(0, i, w) for i in range(1, leaves + 1)])


def complete(n: int, w: float = 1.0) -> Graph:
    return Graph.from_edges(n, [(i, j, w) for i in range(n) for j in range(i + 1, n)])


def barbell(k: int = 3, bridge: float = 0.01, w: float = 1.0):
    """Two K_k cliques joined by one edge ``(k-1, k)``; returns ``(graph, natural 2-partition)``."""
    edges = []
    for off in (0, k):
        edges += [(off + i, off + j, w) for i in range(k) for j in range(i + 1, k)]
    edges.append((k - 1, k, bridge))
    g = Graph.from_edges(2 * k, edges)
    return g, Partition(2, [0] * k + [1] * k)


def planted_partition(
    sizes: Sequence[int],
    p_in: float = 0.5,
    extra_inter: int = 0,
    w_in: float = 1.0,
    w_out: float = 0.05,
    seed=None,
):
    """Random clustered graph with a known partition.

    Each cluster is a ring plus Erdos-Renyi edges with probability ``p_in``,
    so it is connected.  Clusters are linked by a random spanning tree of
    single inter-cluster edges plus ``extra_inter`` further random ones, all
    with weight ``w_out``.  Returns ``(graph, partition)``.
    """
    rng = np.random.default_rng(seed)
    sizes = [int(s) for s in sizes]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    n = int(offsets[-1])
    edges = {}
    for c, s in enumerate(sizes):
        base = int(offsets[c])
        if s == 2:
            edges[(base, base + 1)] = w_in
        elif s > 2:
            for i in range(s):
                a, b = base + i, base + (i + 1) % s
                edges[(min(a, b), max(a, b))] = w_in
        iu, ju = np.triu_indices(s, 1)
        hit = rng.random(iu.size) < p_in
        for i, j in zip(iu[hit], ju[hit]):
            edges[(base + int(i), base + int(j))] = w_in

    def inter(c1, c2):
        a = int(offsets[c1] + rng.integers(sizes[c1]))
        b = int(offsets[c2] + rng.integers(sizes[c2]))
        edges[(min(a, b), max(a, b))] = w_out

    q = len(sizes)
    for c in range(1, q):
        inter(c, int(rng.integers(c)))
    for _ in range(extra_inter if q > 1 else 0):
        c1, c2 = rng.choice(q, size=2, replace=False)
        inter(int(c1), int(c2))

    g = Graph.from_edges(n, [(i, j, w) for (i, j), w in edges.items()])
    assignment = np.repeat(np.arange(q), sizes)
    return g, Partition(q, assignment)


def five_cluster(seed, n_range=(50, 100)):
    """Standard 5-cluster test family.

    Cluster sizes are random (at least 8), clusters are ring + ER(0.3) with unit
    weights, and ``2n`` random inter-cluster edges of weight 0.05 on top of a
    spanning tree.  Returns ``(graph, partition)``.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    sizes = random_sizes(n, 5, rng, min_size=8)
    return planted_partition(sizes, 0.3, extra_inter=2 * n, w_out=0.05, seed=rng)


def random_sizes(n: int, q: int, rng, min_size: int = 3) -> list:
    """Split ``n`` into ``q`` random parts of at least ``min_size``."""
    rest = n - q * min_size
    if rest < 0:
        raise ValueError("n too small for q clusters of min_size")
    cuts = np.sort(rng.integers(0, rest + 1, size=q - 1))
    parts = np.diff(np.concatenate([[0], cuts, [rest]]))
    return [int(min_size + p) for p in parts]


def random_partition(n: int, q: int, rng) -> Partition:
    """Uniformly random assignment, re-drawn until every cluster is non-empty."""
    while True:
        a = rng.integers(q, size=n)
        if np.unique(a).size == q:
            return Partition(q, a)


def random_graph(n: int, p: float, rng, weighted: bool = True, components: int = 1) -> Graph:
    """Random graph with exactly ``components`` connected components.

    Vertices are split into contiguous blocks, each made connected by a random
    spanning tree before Erdos-Renyi edges are sprinkled inside the block.
    """
    bounds = np.linspace(0, n, components + 1).astype(int)
    edges = {}
    for b0, b1 in zip(bounds[:-1], bounds[1:]):
        verts = rng.permutation(np.arange(b0, b1))
        for k in range(1, verts.size):
            a, b = int(verts[k]), int(verts[rng.integers(k)])
            edges[(min(a, b), max(a, b))] = None
        s = b1 - b0
        iu, ju = np.triu_indices(s, 1)
        hit = rng.random(iu.size) < p
        for i, j in zip(iu[hit], ju[hit]):
            edges[(b0 + int(i), b0 + int(j))] = None
    keys = sorted(edges)
    w = rng.uniform(0.1, 2.0, size=len(keys)) if weighted else np.ones(len(keys))
    return Graph.from_edges(n, [(i, j, float(x)) for (i, j), x in zip(keys, w)])
