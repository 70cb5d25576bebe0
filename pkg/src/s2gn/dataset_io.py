"""TU-format dataset loading and export of graphs, feature matrices and reports."""

from __future__ import annotations

import csv
import json
import logging
import os
import tempfile
import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Graph, build_graph

log = logging.getLogger(__name__)

# name -> (N_G, #C_max, N_C, mean #nodes, mean #edges), rounded as published
TU_REFERENCE_STATS = {
    "MUTAG": (188, 125, 2, 18, 20),
    "PTC": (344, 192, 2, 14, 14),
    "PROTEINS": (1113, 663, 2, 39, 73),
    "ENZYMES": (600, 100, 6, 32, 63),
    "NCI1": (4110, 2057, 2, 30, 32),
    "NCI109": (4127, 2079, 2, 30, 32),
    "IMDB-BINARY": (1000, 500, 2, 20, 193),
    "DD": (1178, 691, 2, 284, 716),
}
_ALIASES = {"PTC_MR": "PTC", "D&D": "DD"}


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetStats:
    n_graphs: int
    largest_class: int
    n_classes: int
    mean_nodes: float
    mean_edges: float


@dataclass
class Dataset:
    name: str
    graphs: list[Graph]
    class_labels: list[int]
    original_labels: list[int] | None = None

    def __post_init__(self):
        if len(self.graphs) != len(self.class_labels):
            raise DatasetError(
                f"{len(self.graphs)} graphs but {len(self.class_labels)} class labels"
            )

    def __len__(self):
        return len(self.graphs)

    def stats(self) -> DatasetStats:
        counts = Counter(self.class_labels)
        return DatasetStats(
            len(self.graphs),
            max(counts.values()) if counts else 0,
            len(counts),
            float(np.mean([g.node_count for g in self.graphs])) if self.graphs else 0.0,
            float(np.mean([g.edge_count for g in self.graphs])) if self.graphs else 0.0,
        )


def reference_mismatches(name: str, stats: DatasetStats) -> list[str]:
    """Differences from the published statistics; exact on counts, +-1 on means."""
    key = _ALIASES.get(name.upper(), name.upper())
    if key not in TU_REFERENCE_STATS:
        return []
    n_g, c_max, n_c, nodes, edges = TU_REFERENCE_STATS[key]
    out = []
    for label, got, want in (("N_G", stats.n_graphs, n_g), ("#C_max", stats.largest_class, c_max),
                             ("N_C", stats.n_classes, n_c)):
        if got != want:
            out.append(f"{label} is {got}, expected {want}")
    for label, got, want in (("#Nodes", stats.mean_nodes, nodes), ("#Edges", stats.mean_edges, edges)):
        if abs(got - want) > 1:
            out.append(f"mean {label} is {got:.2f}, expected {want} +- 1")
    return out


def _read_ints(path: Path, width: int) -> list[list[int]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) < width:
                raise DatasetError(f"{path}:{lineno}: expected {width} values, got {line!r}")
            try:
                rows.append([int(float(p)) for p in parts[:width]])
            except ValueError:
                raise DatasetError(f"{path}:{lineno}: malformed line {line!r}") from None
    return rows


def load_tu_dataset(dir_path, name: str, validate: bool = True) -> Dataset:
    """Read ``{name}_A.txt``, ``{name}_graph_indicator.txt``,
    ``{name}_graph_labels.txt`` and optionally ``{name}_node_labels.txt``.

    Node ids are re-based per graph, duplicate edge directions collapse and
    class labels are remapped to ``0..N_C-1`` in sorted order.
    """
    d = Path(dir_path)
    files = {k: d / f"{name}_{k}.txt" for k in ("A", "graph_indicator", "graph_labels")}
    for path in files.values():
        if not path.is_file():
            raise DatasetError(f"missing dataset file {path}")
    indicator = [r[0] for r in _read_ints(files["graph_indicator"], 1)]
    raw_labels = [r[0] for r in _read_ints(files["graph_labels"], 1)]
    n_graphs = len(raw_labels)

    node_graph = []
    local = []
    sizes = [0] * n_graphs
    for lineno, gid in enumerate(indicator, 1):
        if not 1 <= gid <= n_graphs:
            raise DatasetError(
                f"{files['graph_indicator']}:{lineno}: node refers to graph {gid}, "
                f"but only {n_graphs} graphs are labelled"
            )
        node_graph.append(gid - 1)
        local.append(sizes[gid - 1])
        sizes[gid - 1] += 1

    edges: list[list[tuple[int, int]]] = [[] for _ in range(n_graphs)]
    with open(files["A"], encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                a, b = (int(p) for p in line.split(","))
            except ValueError:
                raise DatasetError(f"{files['A']}:{lineno}: malformed edge line {line!r}") from None
            if not (1 <= a <= len(node_graph) and 1 <= b <= len(node_graph)):
                raise DatasetError(f"{files['A']}:{lineno}: node id out of range in {line!r}")
            ga, gb = node_graph[a - 1], node_graph[b - 1]
            if ga != gb:
                raise DatasetError(f"{files['A']}:{lineno}: edge {line!r} joins two graphs")
            edges[ga].append((local[a - 1], local[b - 1]))

    node_labels: list[list[int]] | None = None
    nl_path = d / f"{name}_node_labels.txt"
    if nl_path.is_file():
        flat = [r[0] for r in _read_ints(nl_path, 1)]
        if len(flat) != len(node_graph):
            raise DatasetError(f"{nl_path}: {len(flat)} labels for {len(node_graph)} nodes")
        node_labels = [[] for _ in range(n_graphs)]
        for gid, lab in zip(node_graph, flat):
            node_labels[gid].append(lab)

    graphs = [
        build_graph(sizes[i], edges[i], node_labels[i] if node_labels else None)
        for i in range(n_graphs)
    ]
    remap = {c: i for i, c in enumerate(sorted(set(raw_labels)))}
    ds = Dataset(name, graphs, [remap[c] for c in raw_labels], raw_labels)
    if validate:
        for problem in reference_mismatches(name, ds.stats()):
            warnings.warn(f"{name}: {problem}")
    return ds


def write_text_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def export_edge_lists(graphs, dir_path, labels=None, provenance: dict | None = None) -> Path:
    """Write ``g{i}.edges`` (one ``u v`` line per edge) and ``index.json``."""
    out = Path(dir_path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        entries = []
        for i, g in enumerate(graphs):
            fname = f"g{i}.edges"
            write_text_atomic(out / fname, "".join(f"{u} {v}\n" for u, v in g.edges))
            entries.append({
                "file": fname,
                "node_count": g.node_count,
                "label": None if labels is None else int(labels[i]),
            })
        index = {"provenance": provenance or {}, "graphs": entries}
        write_text_atomic(out / "index.json", json.dumps(index, indent=1) + "\n")
    except OSError as exc:
        raise OSError(f"failed to export edge lists to {out}: {exc}") from exc
    return out


def import_edge_lists(dir_path) -> tuple[list[Graph], list[int | None], dict]:
    """Inverse of :func:`export_edge_lists`: (graphs, labels, provenance)."""
    d = Path(dir_path)
    index_path = d / "index.json"
    if not index_path.is_file():
        raise DatasetError(f"missing {index_path}")
    index = json.loads(index_path.read_text(encoding="utf-8"))
    graphs, labels = [], []
    for entry in index["graphs"]:
        path = d / entry["file"]
        edges = []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if line.strip():
                    try:
                        u, v = (int(p) for p in line.split())
                    except ValueError:
                        raise DatasetError(f"{path}:{lineno}: malformed edge line") from None
                    edges.append((u, v))
        graphs.append(build_graph(entry["node_count"], edges))
        labels.append(entry.get("label"))
    return graphs, labels, index.get("provenance", {})


def write_features_csv(matrix, labels, columns, path) -> None:
    x = np.asarray(matrix, dtype=float)
    if x.ndim != 2 or x.shape[1] != len(columns) or len(x) != len(labels):
        raise ValueError(f"matrix {x.shape} does not fit {len(columns)} columns / {len(labels)} labels")
    lines = [",".join(list(columns) + ["label"])]
    for row, lab in zip(x, labels):
        # repr() gives the shortest string that round-trips exactly
        lines.append(",".join([repr(float(v)) for v in row] + [str(int(lab))]))
    write_text_atomic(Path(path), "\n".join(lines) + "\n")


def read_features_csv(path) -> tuple[np.ndarray, list[int], list[str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [r for r in reader if r]
    if not header or header[-1] != "label":
        raise DatasetError(f"{path}: last column must be 'label'")
    x = np.array([[float(v) for v in r[:-1]] for r in rows]).reshape(len(rows), len(header) - 1)
    return x, [int(r[-1]) for r in rows], header[:-1]


def write_report_json(report: dict, path) -> None:
    write_text_atomic(Path(path), json.dumps(report, indent=2) + "\n")
