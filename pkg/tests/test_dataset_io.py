import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import DATA, graphs
from oracles import complete
from s2gn.dataset_io import (
    Dataset,
    DatasetError,
    DatasetStats,
    export_edge_lists,
    import_edge_lists,
    load_tu_dataset,
    read_features_csv,
    reference_mismatches,
    write_features_csv,
    write_report_json,
)
from s2gn.graph import build_graph


def write_tu(d, name, a, indicator, labels, node_labels=None):
    (d / f"{name}_A.txt").write_text("".join(f"{u}, {v}\n" for u, v in a))
    (d / f"{name}_graph_indicator.txt").write_text("".join(f"{g}\n" for g in indicator))
    (d / f"{name}_graph_labels.txt").write_text("".join(f"{c}\n" for c in labels))
    if node_labels is not None:
        (d / f"{name}_node_labels.txt").write_text("".join(f"{c}\n" for c in node_labels))


@pytest.fixture
def tiny(tmp_path):
    # graph 1: triangle on global nodes 1-3 (both directions listed)
    # graph 2: path 4-5-6-7 (one direction only)
    a = [(1, 2), (2, 1), (2, 3), (3, 2), (1, 3), (3, 1), (4, 5), (5, 6), (6, 7)]
    write_tu(tmp_path, "TINY", a, [1, 1, 1, 2, 2, 2, 2], [-1, 1], [0, 0, 1, 2, 2, 2, 2])
    return tmp_path


class TestLoader:
    def test_tiny(self, tiny):
        ds = load_tu_dataset(tiny, "TINY")
        assert ds.graphs[0].edges == complete(3).edges
        assert ds.graphs[1].edges == ((0, 1), (1, 2), (2, 3))
        assert ds.graphs[0].node_labels == (0, 0, 1)
        assert ds.class_labels == [0, 1] and ds.original_labels == [-1, 1]
        assert ds.stats() == DatasetStats(2, 1, 2, 3.5, 3.0)

    def test_missing_file(self, tiny):
        (tiny / "TINY_graph_labels.txt").unlink()
        with pytest.raises(DatasetError, match="TINY_graph_labels.txt"):
            load_tu_dataset(tiny, "TINY")

    def test_node_in_unknown_graph(self, tmp_path):
        write_tu(tmp_path, "BAD", [(1, 2)], [1, 3], [0])
        with pytest.raises(DatasetError, match=r"graph_indicator.txt:2"):
            load_tu_dataset(tmp_path, "BAD")

    def test_malformed_edge_line(self, tiny):
        with open(tiny / "TINY_A.txt", "a") as fh:
            fh.write("7; 4\n")
        with pytest.raises(DatasetError, match=r"TINY_A.txt:10"):
            load_tu_dataset(tiny, "TINY")

    def test_edge_across_graphs(self, tmp_path):
        write_tu(tmp_path, "X", [(1, 3)], [1, 1, 2], [0, 1])
        with pytest.raises(DatasetError, match="joins two graphs"):
            load_tu_dataset(tmp_path, "X")

    @pytest.mark.filterwarnings("ignore:MUTAG")
    def test_reference_stats_warning(self, tiny):
        for f in tiny.iterdir():
            f.rename(tiny / f.name.replace("TINY", "MUTAG"))
        with pytest.warns(UserWarning, match="N_G"):
            load_tu_dataset(tiny, "MUTAG")

    def test_reference_mismatch_rules(self):
        assert reference_mismatches("MUTAG", DatasetStats(188, 125, 2, 17.93, 19.79)) == []
        assert reference_mismatches("ENZYMES", DatasetStats(600, 100, 6, 32.63, 62.14)) == []
        assert len(reference_mismatches("mutag", DatasetStats(188, 126, 2, 20.0, 19.79))) == 2
        assert reference_mismatches("UNKNOWN", DatasetStats(1, 1, 1, 1, 1)) == []

    def test_dataset_length_check(self):
        with pytest.raises(DatasetError):
            Dataset("x", [complete(3)], [0, 1])


class TestEdgeLists:
    def test_k3_file(self, tmp_path):
        export_edge_lists([complete(3), build_graph(4, [])], tmp_path, [1, 0], {"strategy": "st"})
        assert (tmp_path / "g0.edges").read_text() == "0 1\n0 2\n1 2\n"
        assert (tmp_path / "g1.edges").read_text() == ""
        index = json.loads((tmp_path / "index.json").read_text())
        assert index["provenance"] == {"strategy": "st"}
        assert index["graphs"][1] == {"file": "g1.edges", "node_count": 4, "label": 0}

    @settings(derandomize=True, max_examples=30, deadline=None)
    @given(st.lists(graphs(max_nodes=10), max_size=5))
    def test_round_trip(self, tmp_path_factory, gs):
        d = tmp_path_factory.mktemp("rt")
        export_edge_lists(gs, d)
        back, labels, prov = import_edge_lists(d)
        assert [(g.node_count, g.edges) for g in back] == [(g.node_count, g.edges) for g in gs]
        assert labels == [None] * len(gs) and prov == {}

    def test_vendored_mutag_structures(self):
        gs, labels, prov = import_edge_lists(DATA / "mutag_structures")
        assert len(gs) == 188 and prov["source"]
        assert np.mean([g.node_count for g in gs]) == pytest.approx(17.93, abs=0.01)
        assert np.mean([g.edge_count for g in gs]) == pytest.approx(19.79, abs=0.01)

    def test_missing_index(self, tmp_path):
        with pytest.raises(DatasetError):
            import_edge_lists(tmp_path)


class TestFeatureFiles:
    def test_single_row(self, tmp_path):
        cols = [f"c{i}" for i in range(10)]
        path = tmp_path / "f.csv"
        write_features_csv(np.arange(10.0)[None] / 3, [1], cols, path)
        assert len(path.read_text().splitlines()) == 2

    @settings(derandomize=True, max_examples=50, deadline=None)
    @given(st.integers(1, 6), st.integers(1, 5), st.integers(0, 2**32))
    def test_bit_exact_round_trip(self, tmp_path_factory, rows, cols, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(rows, cols)) * 10.0 ** rng.integers(-30, 30, size=(rows, cols))
        labels = rng.integers(0, 3, size=rows).tolist()
        path = tmp_path_factory.mktemp("csv") / "m.csv"
        write_features_csv(x, labels, [f"f{i}" for i in range(cols)], path)
        back, lab, names = read_features_csv(path)
        assert np.array_equal(back, x) and lab == labels and len(names) == cols

    def test_shape_mismatch(self, tmp_path):
        with pytest.raises(ValueError):
            write_features_csv(np.zeros((2, 3)), [0, 1], ["a", "b"], tmp_path / "x.csv")

    def test_report_json(self, tmp_path):
        report = {"mean_f1": 0.5, "per_repetition": [0.5] * 100}
        write_report_json(report, tmp_path / "r.json")
        assert len(json.loads((tmp_path / "r.json").read_text())["per_repetition"]) == 100
