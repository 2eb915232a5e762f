import os
from pathlib import Path

import numpy as np
import pytest

from graph_rge.schemas.graph import Dataset, Graph
from graph_rge.services.spectral import node_embeddings


def graph(n, edges, labels=None):
    return Graph(node_count=n, edges=tuple(edges), node_labels=None if labels is None else tuple(labels))


@pytest.fixture
def single_edge():
    return graph(2, [(0, 1)])


@pytest.fixture
def triangle():
    return graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3():
    return graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def star():
    return graph(4, [(0, 1), (0, 2), (0, 3)], labels=[0, 0, 0, 0])


@pytest.fixture
def triangle_pendant():
    return graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)], labels=[0, 0, 0, 0])


def random_graph(rng, n, p=0.4, labels=None):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    if not edges:
        edges = [(0, 1)]
    node_labels = None if labels is None else [int(x) for x in rng.integers(0, labels, size=n)]
    return graph(n, edges, node_labels)


def random_dataset(seed, count, low=3, high=10, labels=None, name="RANDOM"):
    rng = np.random.default_rng(seed)
    graphs = tuple(random_graph(rng, int(rng.integers(low, high + 1)), labels=labels) for _ in range(count))
    return Dataset(name=name, graphs=graphs, graph_labels=tuple(k % 2 for k in range(count)))


@pytest.fixture
def embed():
    return node_embeddings


def write_files(root: Path, name: str, files: dict[str, str]) -> Path:
    root.mkdir(parents=True, exist_ok=True)
    for suffix, text in files.items():
        (root / f"{name}_{suffix}.txt").write_text(text)
    return root


def dataset_root(name):
    """Directory holding a benchmark dataset, or None when it is not available."""
    root = Path(os.getenv("RGE_DATA_ROOT", "data"))
    for candidate in (root / name, root):
        if (candidate / f"{name}_A.txt").is_file():
            return candidate
    return None
