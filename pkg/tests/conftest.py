import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from s2gn.graph import build_graph  # noqa: E402

DATA = Path(__file__).parent / "data"

_ACCEPTANCE_LINES: list[str] = []


@st.composite
def graphs(draw, min_nodes=0, max_nodes=12):
    n = draw(st.integers(min_nodes, max_nodes))
    if n < 2:
        return build_graph(n, [])
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    return build_graph(n, draw(st.lists(pairs, max_size=3 * n)))


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def write_toy_tu(root: Path, name: str = "TOY", n_per_class: int = 10) -> Path:
    """Two-class TU dataset: random trees (label 1) and chorded cycles (label 2)."""
    import numpy as np

    rng = np.random.default_rng(0)
    d = root / name
    d.mkdir(parents=True, exist_ok=True)
    a, indicator, labels = [], [], []
    offset = 0
    for gid in range(1, 2 * n_per_class + 1):
        n = int(rng.integers(6, 11))
        if gid % 2:
            edges = [(int(rng.integers(v)), v) for v in range(1, n)]
            labels.append(1)
        else:
            edges = [(v, (v + 1) % n) for v in range(n)] + [(0, n // 2), (1, n - 2)]
            labels.append(2)
        a += [(u + offset + 1, v + offset + 1) for u, v in edges]
        indicator += [gid] * n
        offset += n
    (d / f"{name}_A.txt").write_text("".join(f"{u}, {v}\n" for u, v in a))
    (d / f"{name}_graph_indicator.txt").write_text("".join(f"{g}\n" for g in indicator))
    (d / f"{name}_graph_labels.txt").write_text("".join(f"{c}\n" for c in labels))
    return d


@pytest.fixture
def toy_tu(tmp_path):
    return write_toy_tu(tmp_path)
