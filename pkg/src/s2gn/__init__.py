"""S2GN: subgraph networks built on sampled substructures (sampled line-graph
transforms) and attribute-based graph classification on top of them."""

from .graph import Graph, build_graph
from .sampling import SamplingStrategy
from .sgn import line_graph, s2gn, sgn_exact

__all__ = ["Graph", "build_graph", "SamplingStrategy", "line_graph", "s2gn", "sgn_exact"]
__version__ = "0.1.0"
