"""Subgraph-network mapping (iterated line graphs) and the sampled S2GN
construction loop."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, GraphError, is_connected, largest_connected_component
from .sampling import SamplingStrategy, sample

ALLOWED_ORDERS = (1, 2)


def line_graph(g: Graph) -> Graph:
    """Node i of the result is ``g.edges[i]``; two nodes are adjacent iff the
    corresponding edges share an endpoint."""
    incident: list[list[int]] = [[] for _ in range(g.node_count)]
    for idx, (u, v) in enumerate(g.edges):
        incident[u].append(idx)
        incident[v].append(idx)
    pairs = []
    for inc in incident:
        k = len(inc)
        for i in range(k):
            a = inc[i]
            for j in range(i + 1, k):
                pairs.append((a, inc[j]))
    # two distinct simple edges share at most one endpoint, so pairs are unique
    pairs.sort()
    return Graph(g.edge_count, tuple(pairs))


def _check_order(h: int) -> None:
    if h not in ALLOWED_ORDERS:
        raise ValueError(f"order must be one of {ALLOWED_ORDERS}, got {h}")


def sgn_exact(g: Graph, h: int) -> Graph:
    _check_order(h)
    for _ in range(h):
        g = line_graph(g)
    return g


@dataclass(frozen=True)
class StageRecord:
    input_nodes: int
    component_nodes: int
    sampled_edges: int
    output_nodes: int
    output_edges: int
    truncated: bool


@dataclass(frozen=True)
class S2gnResult:
    graph: Graph
    order: int
    achieved_order: int
    strategy: SamplingStrategy
    truncated: bool
    stages: tuple[StageRecord, ...] = ()
    stage_graphs: tuple[Graph, ...] = field(default=(), repr=False)


def s2gn(g: Graph, strategy: SamplingStrategy, h: int, rng: np.random.Generator) -> S2gnResult:
    """Repeat ``h`` times: restrict to the largest component, sample a
    substructure with edge budget equal to the current node count, map it to
    its line graph.

    Stops early once the working graph has fewer than 2 nodes or no edges;
    ``achieved_order`` then reports how many stages ran.
    """
    _check_order(h)
    if g.node_count == 0:
        raise GraphError("cannot build an S2GN from an empty graph")
    current = g
    stages = []
    graphs = []
    truncated = False
    for _ in range(h):
        if current.node_count < 2 or current.edge_count < 1:
            break
        n_in = current.node_count
        if not is_connected(current):
            current = largest_connected_component(current)
        sub = sample(current, strategy, rng)
        out = line_graph(sub.graph)
        stages.append(
            StageRecord(n_in, current.node_count, sub.graph.edge_count,
                        out.node_count, out.edge_count, sub.truncated)
        )
        truncated |= sub.truncated
        current = out
        graphs.append(out)
    return S2gnResult(current, h, len(stages), strategy, truncated, tuple(stages), tuple(graphs))
