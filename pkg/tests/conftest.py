"""Shared test oracles and helpers.

The oracles here are deliberately naive and independent of the package
kernels: components come from a queue BFS over adjacency lists, weak
components of a functional graph from BFS over the undirected pointer
edges.  Algorithm outputs are judged against these, never against each
other.
"""

from collections import deque
from itertools import combinations

import numpy as np

from mpcc import PriorityMap, from_edges


def bfs_components(g):
    """Min-id component labels by plain BFS; the exactness oracle."""
    adj = [[] for _ in range(g.n)]
    for v in range(g.n):
        adj[v] = list(map(int, g.neighbors(v)))
    labels = np.full(g.n, -1, dtype=np.int64)
    for s in range(g.n):
        if labels[s] >= 0:
            continue
        seen = [s]
        labels[s] = s
        q = deque([s])
        while q:
            v = q.popleft()
            for u in adj[v]:
                if labels[u] < 0:
                    labels[u] = s
                    seen.append(u)
                    q.append(u)
        # s is the smallest unvisited id, so it is the component minimum
    return labels


def digraph_wcc(f):
    """Min-id weak-component labels of v -> f(v), BFS on undirected edges."""
    n = len(f)
    adj = [[] for _ in range(n)]
    for v in range(n):
        adj[v].append(int(f[v]))
        adj[int(f[v])].append(v)
    labels = np.full(n, -1, dtype=np.int64)
    for s in range(n):
        if labels[s] >= 0:
            continue
        labels[s] = s
        q = deque([s])
        while q:
            v = q.popleft()
            for u in adj[v]:
                if labels[u] < 0:
                    labels[u] = s
                    q.append(u)
    return labels


def forced_priorities(values):
    """PriorityMap whose order follows the given values, ties by vertex id."""
    return PriorityMap.from_hashes(np.asarray(values, dtype=np.uint64))


def priority_source(values_by_phase):
    """Fixed per-phase priorities for hand-traced runs.

    values_by_phase[i] must cover the node count alive at phase i; a list
    shorter than the run repeats its last entry truncated to size.
    """
    def source(phase, n):
        vals = values_by_phase[min(phase, len(values_by_phase) - 1)]
        return forced_priorities(list(vals)[:n])
    return source


def identity_source(phase, n):
    return forced_priorities(np.arange(n))


def all_graphs(n):
    """Every labeled simple graph on n vertices, one per edge mask."""
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        u = np.array([pairs[i][0] for i in range(len(pairs)) if mask >> i & 1],
                     dtype=np.int64)
        v = np.array([pairs[i][1] for i in range(len(pairs)) if mask >> i & 1],
                     dtype=np.int64)
        yield from_edges(n, u, v)


def random_gnp(rng, n_lo=2, n_hi=60, p_hi=0.2):
    n = int(rng.integers(n_lo, n_hi + 1))
    p = float(rng.uniform(0.0, p_hi))
    mask = rng.random((n, n)) < p
    u, v = np.nonzero(np.triu(mask, 1))
    return from_edges(n, u.astype(np.int64), v.astype(np.int64))
