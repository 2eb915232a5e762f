# services/dataset.py
"""Benchmark-format ingestion and export, synthetic graphs, and WL relabeling.

The benchmark format is a directory with one global node numbering:

    NAME_A.txt               "u, v" per line, 1-indexed global node ids
    NAME_graph_indicator.txt graph id (1-indexed) per node line
    NAME_graph_labels.txt    class per graph line
    NAME_node_labels.txt     optional, label per node line
"""

import logging
import re
from pathlib import Path
from typing import Iterator, Optional

import numpy as np

from ..exceptions import (
    DatasetConsistencyError,
    DatasetFormatError,
    DatasetParseError,
    PreconditionError,
)
from ..schemas.graph import Dataset, Graph
from ..utils.seeds import child_seeds

logger = logging.getLogger(__name__)

_SEPARATORS = re.compile(r"[,\s]+")


def _dataset_file(root: Path, name: str, suffix: str) -> Path:
    return root / f"{name}_{suffix}.txt"


def _read_int_rows(path: Path) -> Iterator[tuple[int, list[int]]]:
    """Yield (line number, integers) for every non-blank line."""
    try:
        handle = open(path, "rb")
    except OSError as exc:
        raise DatasetFormatError(f"Cannot read {path.name}: {exc}")
    with handle:
        for line_number, raw in enumerate(handle, start=1):
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError:
                raise DatasetFormatError(f"{path.name}:{line_number}: not valid UTF-8 text")
            tokens = [t for t in _SEPARATORS.split(text.strip()) if t]
            if not tokens:
                continue
            row = []
            for token in tokens:
                try:
                    row.append(int(token))
                except ValueError:
                    raise DatasetParseError(path.name, line_number, token)
            yield line_number, row


def _read_column(path: Path) -> list[int]:
    values = []
    for line_number, row in _read_int_rows(path):
        if len(row) != 1:
            raise DatasetConsistencyError(
                f"{path.name}:{line_number}: expected one value, got {len(row)}", line_number
            )
        values.append(row[0])
    return values


def _compress(values: list[int]) -> list[int]:
    """Map values onto 0..k-1 preserving their sorted order."""
    mapping = {value: index for index, value in enumerate(sorted(set(values)))}
    return [mapping[v] for v in values]


def parse_dataset(root_path, name: str) -> Dataset:
    """Read a benchmark-format dataset into per-graph, 0-indexed graphs."""
    root = Path(root_path)
    files = {
        suffix: _dataset_file(root, name, suffix)
        for suffix in ("A", "graph_indicator", "graph_labels")
    }
    for path in files.values():
        if not path.is_file():
            raise DatasetFormatError(f"Missing dataset file: {path.name}")
    node_label_path = _dataset_file(root, name, "node_labels")

    indicator = _read_column(files["graph_indicator"])
    graph_labels = _read_column(files["graph_labels"])
    graph_count = len(graph_labels)
    logger.info(f"Parsing {name}: {graph_count} graphs, {len(indicator)} nodes")

    # Local index of every global node within its graph.
    local_index = []
    node_counts = [0] * graph_count
    for line_number, graph_id in enumerate(indicator, start=1):
        if not 1 <= graph_id <= graph_count:
            raise DatasetConsistencyError(
                f"{files['graph_indicator'].name}:{line_number}: graph id {graph_id} "
                f"outside 1..{graph_count}",
                line_number,
            )
        local_index.append(node_counts[graph_id - 1])
        node_counts[graph_id - 1] += 1
    for graph_id, count in enumerate(node_counts, start=1):
        if count == 0:
            raise DatasetConsistencyError(f"Graph {graph_id} has no nodes")

    edge_sets: list[set[tuple[int, int]]] = [set() for _ in range(graph_count)]
    self_loops = 0
    for line_number, row in _read_int_rows(files["A"]):
        if len(row) != 2:
            raise DatasetConsistencyError(
                f"{files['A'].name}:{line_number}: expected two node ids", line_number
            )
        u, v = row
        for node in (u, v):
            if not 1 <= node <= len(indicator):
                raise DatasetConsistencyError(
                    f"{files['A'].name}:{line_number}: node {node} does not exist", line_number
                )
        graph_id = indicator[u - 1]
        if indicator[v - 1] != graph_id:
            raise DatasetConsistencyError(
                f"{files['A'].name}:{line_number}: edge ({u}, {v}) joins graphs "
                f"{graph_id} and {indicator[v - 1]}",
                line_number,
            )
        i, j = local_index[u - 1], local_index[v - 1]
        if i == j:
            self_loops += 1
            continue
        edge_sets[graph_id - 1].add((min(i, j), max(i, j)))
    if self_loops:
        logger.warning(f"{name}: dropped {self_loops} self-loops")

    per_graph_labels: Optional[list[list[int]]] = None
    if node_label_path.is_file():
        node_labels = _read_column(node_label_path)
        if len(node_labels) != len(indicator):
            raise DatasetConsistencyError(
                f"{node_label_path.name} has {len(node_labels)} lines for {len(indicator)} nodes"
            )
        per_graph_labels = [[] for _ in range(graph_count)]
        for graph_id, label in zip(indicator, _compress(node_labels)):
            per_graph_labels[graph_id - 1].append(label)

    graphs = tuple(
        Graph(
            node_count=node_counts[k],
            edges=tuple(sorted(edge_sets[k])),
            node_labels=None if per_graph_labels is None else tuple(per_graph_labels[k]),
        )
        for k in range(graph_count)
    )
    return Dataset(name=name, graphs=graphs, graph_labels=tuple(_compress(graph_labels)))


def write_dataset(dataset: Dataset, root_path) -> Path:
    """Write the dataset in benchmark format; each edge is listed both ways."""
    root = Path(root_path)
    root.mkdir(parents=True, exist_ok=True)
    name = dataset.name
    offset = 0
    edge_lines, indicator_lines, node_label_lines = [], [], []
    for graph_id, graph in enumerate(dataset.graphs, start=1):
        for i, j in graph.edges:
            edge_lines.append(f"{i + offset + 1}, {j + offset + 1}")
            edge_lines.append(f"{j + offset + 1}, {i + offset + 1}")
        indicator_lines.extend([str(graph_id)] * graph.node_count)
        if graph.node_labels is not None:
            node_label_lines.extend(str(label) for label in graph.node_labels)
        offset += graph.node_count

    def _write(suffix: str, lines: list[str]) -> None:
        _dataset_file(root, name, suffix).write_text(
            "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8"
        )

    _write("A", edge_lines)
    _write("graph_indicator", indicator_lines)
    _write("graph_labels", [str(label) for label in dataset.graph_labels])
    if dataset.labeled:
        _write("node_labels", node_label_lines)
    logger.info(f"Wrote {name} ({dataset.size} graphs) to {root}")
    return root


def generate_synthetic(node_count: int, seed: int) -> Graph:
    """Unlabeled graph with n nodes and 2n distinct edges drawn uniformly.

    Sampling uses numpy's PCG64 bit generator, so a given seed yields the
    same edge set on every platform.
    """
    if node_count < 3:
        raise PreconditionError(f"Synthetic graphs need at least 3 nodes, got {node_count}")
    pairs = node_count * (node_count - 1) // 2
    edge_count = 2 * node_count
    if edge_count > pairs:
        logger.warning(
            f"{edge_count} edges requested on {node_count} nodes; clamped to {pairs}"
        )
        edge_count = pairs
    rng = np.random.Generator(np.random.PCG64(seed))
    chosen = np.sort(rng.choice(pairs, size=edge_count, replace=False))
    rows, cols = np.triu_indices(node_count, k=1)
    edges = tuple(zip(rows[chosen].tolist(), cols[chosen].tolist()))
    return Graph(node_count=node_count, edges=edges)


def generate_synthetic_dataset(
    graph_count: int, node_count: int, seed: int, classes: int = 2, name: str = "SYNTH"
) -> Dataset:
    """Synthetic dataset; graph k gets placeholder class k % classes."""
    graphs = tuple(generate_synthetic(node_count, s) for s in child_seeds(seed, graph_count))
    labels = tuple(k % classes for k in range(graph_count))
    return Dataset(name=name, graphs=graphs, graph_labels=labels)


def wl_relabel(dataset: Dataset, iterations: int) -> Dataset:
    """Replace node labels with Weisfeiler-Leman labels after `iterations` rounds.

    Compressed ids are shared across the whole dataset and assigned in
    first-encounter order (graphs in order, nodes in order).
    """
    if not dataset.labeled:
        raise PreconditionError("WL relabeling needs node labels on every graph")
    if iterations < 1:
        raise PreconditionError(f"WL iterations must be at least 1, got {iterations}")

    neighbors = [g.neighbors() for g in dataset.graphs]
    labels = [list(g.node_labels) for g in dataset.graphs]
    for round_index in range(iterations):
        codebook: dict[tuple[int, tuple[int, ...]], int] = {}
        refined = []
        for graph_labels, adjacency in zip(labels, neighbors):
            new_labels = []
            for node, label in enumerate(graph_labels):
                signature = (label, tuple(sorted(graph_labels[u] for u in adjacency[node])))
                new_labels.append(codebook.setdefault(signature, len(codebook)))
            refined.append(new_labels)
        labels = refined
        logger.debug(f"WL round {round_index + 1}: {len(codebook)} distinct labels")

    graphs = tuple(
        g.model_copy(update={"node_labels": tuple(new)}) for g, new in zip(dataset.graphs, labels)
    )
    return dataset.model_copy(update={"graphs": graphs})
