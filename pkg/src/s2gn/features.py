"""Manual attribute vectors, sampling-averaged S2GN attributes, fusion and PCA."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import metrics
from .graph import Graph
from .sampling import SamplingStrategy
from .seeding import SeedLike, child_rngs
from .sgn import s2gn

ATTRIBUTE_NAMES = (
    "num_nodes",
    "num_edges",
    "avg_degree",
    "density",
    "avg_clustering",
    "leaf_fraction",
    "largest_eigenvalue",
    "avg_betweenness",
    "avg_closeness",
    "avg_eigenvector",
)
ATTRS_SCHEMA = "attrs-v1"
FUSED_SCHEMA = "fused-v1"

# canonical fusion order; "orig" is the untransformed graph
FUSION_ORDER = ("orig", "rw1", "rw2", "bw1", "bw2", "ls1", "ls2", "st1", "st2")


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[float, ...]
    schema: str
    # set when no repetition reached the requested S2GN order
    degraded: bool = False

    def __post_init__(self):
        vals = tuple(float(x) for x in self.values)
        if not all(np.isfinite(vals)):
            raise ValueError(f"non-finite feature values in {self.schema}: {vals}")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values)


def manual_attributes(g: Graph) -> FeatureVector:
    n, m = g.node_count, g.edge_count
    if n == 0:
        return FeatureVector((0.0,) * len(ATTRIBUTE_NAMES), ATTRS_SCHEMA)
    power = metrics.power_iteration(g)
    values = (
        n,
        m,
        2.0 * m / n,
        2.0 * m / (n * (n - 1)) if n >= 2 else 0.0,
        float(np.mean(metrics.clustering_coefficients(g))),
        metrics.leaf_fraction(g),
        power.eigenvalue,
        float(np.mean(metrics.betweenness_nodes(g))),
        float(np.mean(metrics.closeness(g))),
        float(np.mean(power.vector)),
    )
    return FeatureVector(values, ATTRS_SCHEMA)


def averaged_attributes_by_order(
    g: Graph,
    strategy: SamplingStrategy,
    orders=(1, 2),
    repeats: int = 10,
    rng: SeedLike = None,
) -> dict[int, FeatureVector]:
    """Mean attribute vector of the order-h S2GN for every h in ``orders``.

    Each repetition builds one S2GN chain up to ``max(orders)`` from its own
    child generator, so order-1 and order-2 vectors share their first stage.
    A repetition that stops short of order h contributes its last achieved
    graph to order h.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    top = max(orders)
    sums = {h: np.zeros(len(ATTRIBUTE_NAMES)) for h in orders}
    reached = dict.fromkeys(orders, 0)
    for child in child_rngs(rng, repeats):
        res = s2gn(g, strategy, top, child)
        chain = (g,) + res.stage_graphs
        for h in orders:
            k = min(h, res.achieved_order)
            sums[h] += manual_attributes(chain[k]).as_array()
            reached[h] += k == h
    return {
        h: FeatureVector(sums[h] / repeats, ATTRS_SCHEMA, degraded=reached[h] == 0)
        for h in orders
    }


def averaged_attributes(
    g: Graph, strategy: SamplingStrategy, order: int, repeats: int = 10, rng: SeedLike = None
) -> FeatureVector:
    return averaged_attributes_by_order(g, strategy, (order,), repeats, rng)[order]


def fuse(parts) -> FeatureVector:
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to fuse")
    values = tuple(x for p in parts for x in p.values)
    return FeatureVector(values, FUSED_SCHEMA, degraded=any(p.degraded for p in parts))


def fused_column_names(blocks) -> list[str]:
    return [f"{b}_{name}" for b in blocks for name in ATTRIBUTE_NAMES]


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    scale: np.ndarray
    components: np.ndarray  # (target_dim, input_dim), rows orthonormal
    explained_variance: np.ndarray

    @property
    def target_dim(self) -> int:
        return self.components.shape[0]


def pca_fit(matrix, target_dim: int, standardize: bool = True) -> PcaModel:
    """Covariance eigendecomposition on (optionally z-scored) columns.

    Components are ordered by decreasing eigenvalue and signed so that the
    largest-magnitude entry of each is positive. Constant columns keep unit
    scale.
    """
    x = np.asarray(matrix, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("PCA needs a 2-D matrix with at least 2 rows")
    rows, cols = x.shape
    if not 1 <= target_dim <= min(rows, cols):
        raise ValueError(f"target_dim {target_dim} must be in 1..{min(rows, cols)}")
    mean = x.mean(axis=0)
    scale = np.ones(cols)
    if standardize:
        sd = x.std(axis=0)
        scale = np.where(sd > 0, sd, 1.0)
    z = (x - mean) / scale
    cov = z.T @ z / (rows - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(-evals, kind="stable")[:target_dim]
    comps = evecs[:, order].T.copy()
    for row in comps:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1
    evals = np.clip(evals[order], 0.0, None)
    return PcaModel(mean, scale, comps, evals)


def pca_transform(model: PcaModel, v) -> np.ndarray:
    """Project one vector or a matrix of row vectors."""
    x = np.asarray(v.values if isinstance(v, FeatureVector) else v, dtype=float)
    return ((x - model.mean) / model.scale) @ model.components.T


def pca_inverse_transform(model: PcaModel, t) -> np.ndarray:
    return np.asarray(t, dtype=float) @ model.components * model.scale + model.mean
