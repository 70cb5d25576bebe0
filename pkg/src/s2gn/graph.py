"""Immutable simple undirected graphs with contiguous integer node ids."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

EdgeKey = tuple[int, int]


class GraphError(ValueError):
    pass


def edge_key(u: int, v: int) -> EdgeKey:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on nodes ``0..node_count-1``.

    Build instances with :func:`build_graph`; the constructor assumes the edge
    tuple is already canonical (sorted, deduplicated, ``u < v``).
    """

    node_count: int
    edges: tuple[EdgeKey, ...]
    node_labels: tuple[int, ...] | None = None
    _adj: tuple[tuple[int, ...], ...] = field(default=(), repr=False)

    def __post_init__(self):
        if not self._adj:
            adj: list[list[int]] = [[] for _ in range(self.node_count)]
            for u, v in self.edges:
                adj[u].append(v)
                adj[v].append(u)
            object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and self.edges == other.edges
            and self.node_labels == other.node_labels
        )

    def __hash__(self):
        return hash((self.node_count, self.edges, self.node_labels))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Sorted neighbour tuples indexed by node id."""
        return self._adj

    def degrees(self) -> list[int]:
        return [len(a) for a in self._adj]

    def _check(self, v: int) -> None:
        if not 0 <= v < self.node_count:
            raise GraphError(f"node {v} out of range for graph with {self.node_count} nodes")


def build_graph(
    node_count: int,
    edge_list: Iterable[Sequence[int]],
    node_labels: Sequence[int] | None = None,
) -> Graph:
    """Canonicalise an edge list; self-loops and duplicate edges are dropped."""
    if node_count < 0:
        raise GraphError(f"negative node count {node_count}")
    edges = set()
    for e in edge_list:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{node_count - 1}")
        if u != v:
            edges.add(edge_key(u, v))
    if node_labels is not None:
        if len(node_labels) != node_count:
            raise GraphError(
                f"{len(node_labels)} node labels given for {node_count} nodes"
            )
        node_labels = tuple(int(x) for x in node_labels)
    return Graph(node_count, tuple(sorted(edges)), node_labels)


def degree(g: Graph, v: int) -> int:
    g._check(v)
    return len(g.adjacency[v])


def neighbors(g: Graph, v: int) -> list[int]:
    g._check(v)
    return list(g.adjacency[v])


def connected_components(g: Graph) -> list[list[int]]:
    """Components as sorted node lists, ordered by their smallest node id."""
    seen = [False] * g.node_count
    comps = []
    adj = g.adjacency
    for s in range(g.node_count):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    if g.node_count == 0:
        return True
    seen = {0}
    stack = [0]
    adj = g.adjacency
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == g.node_count


def induced_subgraph(g: Graph, nodes: Sequence[int]) -> Graph:
    """Induced subgraph on ``nodes``; new id i corresponds to ``sorted(nodes)[i]``."""
    order = sorted(nodes)
    index = {v: i for i, v in enumerate(order)}
    edges = [
        (index[u], index[v]) for u, v in g.edges if u in index and v in index
    ]
    labels = None
    if g.node_labels is not None:
        labels = [g.node_labels[v] for v in order]
    return build_graph(len(order), edges, labels)


def largest_connected_component(g: Graph) -> Graph:
    if g.node_count == 0:
        return g
    comps = connected_components(g)
    # max() keeps the first maximum, i.e. the component with the smallest id
    best = max(comps, key=len)
    if len(best) == g.node_count:
        return g
    return induced_subgraph(g, best)


def relabel(g: Graph, mapping: Mapping[int, int] | Sequence[int]) -> Graph:
    """Rewrite node ids through ``mapping`` (old id -> new id), which must be a
    bijection onto ``0..node_count-1``."""
    if isinstance(mapping, Mapping):
        if set(mapping) != set(range(g.node_count)):
            raise GraphError("mapping must cover every node exactly once")
        new = [mapping[v] for v in range(g.node_count)]
    else:
        new = list(mapping)
        if len(new) != g.node_count:
            raise GraphError("mapping must cover every node exactly once")
    if sorted(new) != list(range(g.node_count)):
        raise GraphError(f"mapping {new} is not a bijection onto 0..{g.node_count - 1}")
    labels = None
    if g.node_labels is not None:
        lab = [0] * g.node_count
        for old, nv in enumerate(new):
            lab[nv] = g.node_labels[old]
        labels = lab
    return build_graph(g.node_count, [(new[u], new[v]) for u, v in g.edges], labels)
