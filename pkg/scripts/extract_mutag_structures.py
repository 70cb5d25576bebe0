"""Extract MUTAG graph structures from the ``graphkernels`` source distribution.

That archive pickles the 188 MUTAG molecules as igraph objects (topology plus
atom/bond labels, but no graph class labels). The graphs are written in the
edge-list export format so that ``s2gn bench`` and the timing acceptance test
can run without the TU download.

    python scripts/extract_mutag_structures.py path/to/graphkernels-0.2.1.tar.gz tests/data/mutag_structures

Get the archive with ``pip download --no-deps --no-binary :all: graphkernels==0.2.1``.
igraph itself is not needed.
"""

import argparse
import io
import pickle
import tarfile

from s2gn.dataset_io import export_edge_lists
from s2gn.graph import build_graph


class _IGraphStub:
    def __init__(self, n, edges, directed, graph_attrs, vertex_attrs, edge_attrs):
        self.n, self.edges = n, edges

    def __setstate__(self, state):
        pass


class _Unpickler(pickle.Unpickler):
    def find_class(self, module, name):
        if module == "igraph" and name == "Graph":
            return _IGraphStub
        return super().find_class(module, name)


def load_graphs(archive):
    with tarfile.open(archive) as tar:
        member = next(m for m in tar.getmembers() if m.name.endswith("data.mutag"))
        raw = tar.extractfile(member).read()
    # .npy header, then a pickled object array
    body = raw[raw.index(b"\n") + 1:]
    arr = _Unpickler(io.BytesIO(body), encoding="latin1").load()
    return [build_graph(g.n, g.edges) for g in arr]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("archive")
    ap.add_argument("out")
    args = ap.parse_args()
    graphs = load_graphs(args.archive)
    export_edge_lists(graphs, args.out, provenance={
        "dataset": "MUTAG",
        "source": "graphkernels-0.2.1 sdist, graphkernels/data.mutag",
        "class_labels": "not included in source",
    })
    print(f"wrote {len(graphs)} graphs to {args.out}")


if __name__ == "__main__":
    main()
