"""Substructure sampling: random walk, biased (node2vec-style) walk, link
selection and randomised Kruskal spanning trees, plus source selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import EdgeKey, Graph, GraphError, build_graph, edge_key, is_connected
from .metrics import edge_betweenness, k_shell

STEP_CAP_FACTOR = 50

STRATEGY_TAGS = ("rw", "bw", "ls", "st")


@dataclass(frozen=True)
class SamplingStrategy:
    kind: str
    p: float = 1.0
    q: float = 1.0

    def __post_init__(self):
        if self.kind not in STRATEGY_TAGS:
            raise ValueError(f"unknown sampling strategy {self.kind!r}")
        if self.kind == "bw" and (self.p <= 0 or self.q <= 0):
            raise ValueError(f"biased walk needs p > 0 and q > 0, got p={self.p}, q={self.q}")

    @classmethod
    def random_walk(cls):
        return cls("rw")

    @classmethod
    def biased_walk(cls, p: float = 4.0, q: float = 1.0):
        return cls("bw", p, q)

    @classmethod
    def link_selection(cls):
        return cls("ls")

    @classmethod
    def spanning_tree(cls):
        return cls("st")

    @classmethod
    def from_tag(cls, tag: str, p: float = 4.0, q: float = 1.0):
        tag = tag.lower()
        return cls(tag, p, q) if tag == "bw" else cls(tag)

    def __str__(self):
        return f"bw(p={self.p:g},q={self.q:g})" if self.kind == "bw" else self.kind


@dataclass(frozen=True)
class SampledSubstructure:
    graph: Graph
    node_map: tuple[int, ...]  # new id -> original id
    truncated: bool = False

    def original_edges(self) -> set[EdgeKey]:
        m = self.node_map
        return {edge_key(m[u], m[v]) for u, v in self.graph.edges}


def _substructure(nodes, edges, truncated: bool) -> SampledSubstructure:
    order = sorted(nodes)
    index = {v: i for i, v in enumerate(order)}
    g = build_graph(len(order), [(index[u], index[v]) for u, v in edges])
    return SampledSubstructure(g, tuple(order), truncated)


def _check_source(g: Graph, v: int) -> None:
    if not 0 <= v < g.node_count:
        raise GraphError(f"source node {v} out of range for graph with {g.node_count} nodes")


def _component_edge_count(g: Graph, s: int) -> int:
    adj = g.adjacency
    seen = {s}
    stack = [s]
    deg_sum = 0
    while stack:
        u = stack.pop()
        deg_sum += len(adj[u])
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return deg_sum // 2


def select_source_node(g: Graph, strategy: SamplingStrategy, rng: np.random.Generator) -> int:
    """Walk strategies start at the highest k-shell node (smallest id on ties);
    spanning trees at a uniformly random node; link selection at the smaller
    endpoint of its source edge."""
    if g.node_count == 0:
        raise GraphError("cannot select a source node in an empty graph")
    if strategy.kind in ("rw", "bw"):
        cores = k_shell(g)
        return cores.index(max(cores))
    if strategy.kind == "st":
        return int(rng.integers(g.node_count))
    return select_source_edge(g)[0]


def select_source_edge(g: Graph) -> EdgeKey:
    if g.edge_count == 0:
        raise GraphError("cannot select a source edge in an edgeless graph")
    best, best_score = None, -1.0
    for e, score in sorted(edge_betweenness(g).items()):
        # tolerance keeps symmetric edges tied despite float summation order
        if score > best_score + 1e-9:
            best, best_score = e, score
    return best


def biased_weights(g: Graph, prev: int | None, cur: int, p: float, q: float) -> list[float]:
    """Unnormalised second-order weights over ``neighbors(cur)`` (sorted order):
    1/p for returning to ``prev``, 1 for nodes adjacent to ``prev`` and 1/q
    for nodes two hops from ``prev``."""
    nbrs = g.adjacency[cur]
    if prev is None:
        return [1.0] * len(nbrs)
    prev_nbrs = set(g.adjacency[prev])
    out = []
    for x in nbrs:
        if x == prev:
            out.append(1.0 / p)
        elif x in prev_nbrs:
            out.append(1.0)
        else:
            out.append(1.0 / q)
    return out


def transition_probabilities(
    g: Graph, prev: int | None, cur: int, p: float = 1.0, q: float = 1.0
) -> dict[int, float]:
    w = biased_weights(g, prev, cur, p, q)
    total = sum(w)
    return {x: wi / total for x, wi in zip(g.adjacency[cur], w)}


def next_node(g: Graph, prev: int | None, cur: int, rng: np.random.Generator,
              p: float | None = None, q: float | None = None) -> int:
    """One walk step from ``cur``; uniform unless ``p``/``q`` are given and a
    previous node exists."""
    nbrs = g.adjacency[cur]
    if p is None or prev is None:
        return nbrs[int(rng.integers(len(nbrs)))]
    w = np.cumsum(biased_weights(g, prev, cur, p, q))
    return nbrs[int(np.searchsorted(w, rng.random() * w[-1], side="right"))]


def _walk(g, source, budget, step_cap, rng, p=None, q=None) -> SampledSubstructure:
    _check_source(g, source)
    if budget < 1:
        raise ValueError("budget must be >= 1")
    target = min(budget, _component_edge_count(g, source))
    nodes = {source}
    edges: set[EdgeKey] = set()
    prev, cur = None, source
    steps = 0
    while len(edges) < target and steps < step_cap:
        nxt = next_node(g, prev, cur, rng, p, q)
        edges.add(edge_key(cur, nxt))
        nodes.add(nxt)
        prev, cur = cur, nxt
        steps += 1
    return _substructure(nodes, edges, len(edges) < target)


def sample_random_walk(
    g: Graph, source: int, budget: int, step_cap: int, rng: np.random.Generator
) -> SampledSubstructure:
    """Uniform random walk collecting traversed edges until ``budget`` distinct
    edges are held, every edge of the source component has been seen, or
    ``step_cap`` steps have elapsed (the latter short of target sets
    ``truncated``)."""
    return _walk(g, source, budget, step_cap, rng)


def sample_biased_walk(
    g: Graph,
    source: int,
    p: float,
    q: float,
    budget: int,
    step_cap: int,
    rng: np.random.Generator,
) -> SampledSubstructure:
    if p <= 0 or q <= 0:
        raise ValueError(f"biased walk needs p > 0 and q > 0, got p={p}, q={q}")
    return _walk(g, source, budget, step_cap, rng, p, q)


def sample_link_selection(
    g: Graph, source_edge: EdgeKey, budget: int, step_cap: int, rng: np.random.Generator
) -> SampledSubstructure:
    """Grow an edge pool from ``source_edge``: each step picks a pooled node
    uniformly among those that still have an unpooled incident edge, then one
    of those edges uniformly.

    Drawing uniformly over nodes with spare edges is the same distribution as
    drawing over the whole pool and rejecting exhausted nodes.
    """
    u0, v0 = edge_key(*source_edge)
    if not (0 <= u0 < g.node_count and 0 <= v0 < g.node_count) or v0 not in g.adjacency[u0]:
        raise GraphError(f"source edge {source_edge} is not an edge of the graph")
    adj = g.adjacency
    pool_edges = {(u0, v0)}
    pool_nodes = {u0, v0}
    spare = [len(a) for a in adj]
    spare[u0] -= 1
    spare[v0] -= 1
    active: list[int] = []
    slot: dict[int, int] = {}

    def activate(x):
        if spare[x] > 0 and x not in slot:
            slot[x] = len(active)
            active.append(x)

    def deactivate(x):
        i = slot.pop(x)
        last = active.pop()
        if last != x:
            active[i] = last
            slot[last] = i

    activate(u0)
    activate(v0)
    steps = 0
    while len(pool_edges) < budget and active and steps < step_cap:
        u = active[int(rng.integers(len(active)))]
        cands = [w for w in adj[u] if edge_key(u, w) not in pool_edges]
        w = cands[int(rng.integers(len(cands)))]
        pool_edges.add(edge_key(u, w))
        spare[u] -= 1
        spare[w] -= 1
        if spare[u] == 0:
            deactivate(u)
        if w in pool_nodes:
            if spare[w] == 0 and w in slot:
                deactivate(w)
        else:
            pool_nodes.add(w)
            activate(w)
        steps += 1
    truncated = len(pool_edges) < budget and bool(active)
    return _substructure(pool_nodes, pool_edges, truncated)


class _DisjointSet:
    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def sample_spanning_tree(g: Graph, rng: np.random.Generator) -> SampledSubstructure:
    """Unit-weight Kruskal over a uniformly shuffled edge order."""
    if not is_connected(g):
        raise GraphError("spanning tree sampling needs a connected graph")
    ds = _DisjointSet(g.node_count)
    tree = []
    for i in rng.permutation(g.edge_count):
        u, v = g.edges[i]
        if ds.union(u, v):
            tree.append((u, v))
            if len(tree) == g.node_count - 1:
                break
    return SampledSubstructure(build_graph(g.node_count, tree), tuple(range(g.node_count)))


def sample(g: Graph, strategy: SamplingStrategy, rng: np.random.Generator) -> SampledSubstructure:
    """Sample with edge budget ``|V|`` and step cap ``50 |V|``."""
    n = g.node_count
    if n == 0:
        raise GraphError("cannot sample from an empty graph")
    budget, cap = n, STEP_CAP_FACTOR * n
    if strategy.kind == "st":
        return sample_spanning_tree(g, rng)
    if strategy.kind == "ls":
        return sample_link_selection(g, select_source_edge(g), budget, cap, rng)
    source = select_source_node(g, strategy, rng)
    if strategy.kind == "rw":
        return sample_random_walk(g, source, budget, cap, rng)
    return sample_biased_walk(g, source, strategy.p, strategy.q, budget, cap, rng)
