"""Structural metrics: k-shell, Brandes betweenness, closeness, spectral and
clustering statistics.

All functions are pure and accept disconnected graphs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import EdgeKey, Graph, edge_key

POWER_TOL = 1e-9
POWER_MAX_ITER = 1000


def k_shell(g: Graph) -> list[int]:
    """Core number of every node via bucketed minimum-degree peeling."""
    n = g.node_count
    if n == 0:
        return []
    adj = g.adjacency
    deg = [len(a) for a in adj]
    max_deg = max(deg)
    buckets: list[set[int]] = [set() for _ in range(max_deg + 1)]
    for v, d in enumerate(deg):
        buckets[d].add(v)
    core = [0] * n
    removed = [False] * n
    k = 0
    for _ in range(n):
        d = 0
        while not buckets[d]:
            d += 1
        k = max(k, d)
        v = min(buckets[d])
        buckets[d].remove(v)
        removed[v] = True
        core[v] = k
        for w in adj[v]:
            if not removed[w]:
                buckets[deg[w]].remove(w)
                deg[w] -= 1
                buckets[deg[w]].add(w)
    return core


def _brandes(g: Graph, with_edges: bool):
    n = g.node_count
    adj = g.adjacency
    node_bc = [0.0] * n
    edge_bc: dict[EdgeKey, float] = dict.fromkeys(g.edges, 0.0) if with_edges else {}
    for s in range(n):
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    queue.append(w)
                if dist[w] == dv:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                c = sigma[v] * coeff
                if with_edges:
                    edge_bc[edge_key(v, w)] += c
                delta[v] += c
            if w != s:
                node_bc[w] += delta[w]
    # every unordered pair was counted from both endpoints
    node_bc = [x / 2.0 for x in node_bc]
    if with_edges:
        edge_bc = {e: x / 2.0 for e, x in edge_bc.items()}
    return node_bc, edge_bc


def betweenness_nodes(g: Graph) -> list[float]:
    """Exact betweenness normalised by 2/((n-1)(n-2)); all zeros for n <= 2."""
    n = g.node_count
    if n <= 2:
        return [0.0] * n
    raw, _ = _brandes(g, with_edges=False)
    scale = 2.0 / ((n - 1) * (n - 2))
    return [x * scale for x in raw]


def edge_betweenness(g: Graph) -> dict[EdgeKey, float]:
    """Unnormalised edge betweenness (each unordered node pair counted once)."""
    return _brandes(g, with_edges=True)[1]


def bfs_distances(g: Graph, s: int) -> list[int]:
    dist = [-1] * g.node_count
    dist[s] = 0
    queue = deque([s])
    adj = g.adjacency
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def closeness(g: Graph) -> list[float]:
    """Closeness within each component, scaled by (c-1)/(n-1) for a component
    of size c (the Wasserman-Faust correction)."""
    n = g.node_count
    out = [0.0] * n
    for v in range(n):
        total = 0
        reach = 0
        for d in bfs_distances(g, v):
            if d > 0:
                total += d
                reach += 1
        if total > 0 and n > 1:
            out[v] = (reach / total) * (reach / (n - 1))
    return out


@dataclass(frozen=True)
class PowerIterationResult:
    vector: np.ndarray
    eigenvalue: float
    converged: bool
    iterations: int


def adjacency_matrix(g: Graph) -> np.ndarray:
    a = np.zeros((g.node_count, g.node_count))
    if g.edges:
        e = np.asarray(g.edges)
        a[e[:, 0], e[:, 1]] = 1.0
        a[e[:, 1], e[:, 0]] = 1.0
    return a


def _iterate(m: np.ndarray, tol: float, max_iter: int):
    n = m.shape[0]
    x = np.full(n, 1.0 / np.sqrt(n))
    prev2 = None
    for it in range(1, max_iter + 1):
        y = m @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return x, False, it, False
        y /= norm
        if np.abs(y - x).sum() < tol:
            return y, True, it, False
        # a period-2 cycle is the bipartite failure mode; bail out early
        if prev2 is not None and np.abs(y - prev2).sum() < tol:
            return y, False, it, True
        prev2, x = x, y
    return x, False, max_iter, False


def power_iteration(
    g: Graph, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER
) -> PowerIterationResult:
    """Leading adjacency eigenpair from the uniform start vector.

    When the raw iteration does not converge (bipartite graphs oscillate
    between two vectors) it is repeated on A + I, which has the same leading
    eigenvector but no competing eigenvalue of equal magnitude.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    n = g.node_count
    if n == 0:
        return PowerIterationResult(np.zeros(0), 0.0, False, 0)
    if g.edge_count == 0:
        return PowerIterationResult(np.zeros(n), 0.0, False, 0)
    a = adjacency_matrix(g)
    x, ok, it, _ = _iterate(a, tol, max_iter)
    if not ok:
        x, ok, it2, _ = _iterate(a + np.eye(n), tol, max_iter)
        it += it2
    lam = float(x @ (a @ x) / (x @ x))
    return PowerIterationResult(x, lam, ok, it)


def eigenvector_centrality(
    g: Graph, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER
) -> tuple[list[float], bool]:
    """L2-normalised leading eigenvector and a convergence flag."""
    res = power_iteration(g, tol, max_iter)
    return res.vector.tolist(), res.converged


def largest_adjacency_eigenvalue(
    g: Graph, tol: float = POWER_TOL, max_iter: int = POWER_MAX_ITER
) -> tuple[float, bool]:
    res = power_iteration(g, tol, max_iter)
    return res.eigenvalue, res.converged


def triangle_counts(g: Graph) -> list[int]:
    adj_sets = [set(a) for a in g.adjacency]
    tri = [0] * g.node_count
    for u, v in g.edges:
        for w in adj_sets[u] & adj_sets[v]:
            if w > v:
                tri[u] += 1
                tri[v] += 1
                tri[w] += 1
    return tri


def clustering_coefficients(g: Graph) -> list[float]:
    out = []
    for t, d in zip(triangle_counts(g), g.degrees()):
        out.append(2.0 * t / (d * (d - 1)) if d >= 2 else 0.0)
    return out


def leaf_fraction(g: Graph) -> float:
    if g.node_count == 0:
        return 0.0
    return sum(1 for d in g.degrees() if d == 1) / g.node_count
