import logging
from collections import Counter

import pytest
from pydantic import ValidationError

from conftest import graph, random_dataset, write_files
from graph_rge.exceptions import (
    DatasetConsistencyError,
    DatasetFormatError,
    DatasetParseError,
    PreconditionError,
)
from graph_rge.main import main
from graph_rge.schemas.graph import Dataset, Graph
from graph_rge.services.dataset import (
    generate_synthetic,
    generate_synthetic_dataset,
    parse_dataset,
    wl_relabel,
    write_dataset,
)


def test_parse_two_node_dataset(tmp_path):
    root = write_files(tmp_path, "TINY", {
        "A": "1, 2\n2, 1\n",
        "graph_indicator": "1\n1\n",
        "graph_labels": "1\n",
    })
    dataset = parse_dataset(root, "TINY")
    assert dataset.size == 1
    assert dataset.graphs[0] == Graph(node_count=2, edges=((0, 1),))
    assert dataset.graph_labels == (0,)
    assert not dataset.labeled


def test_parse_renumbers_per_graph_and_remaps_classes(tmp_path):
    root = write_files(tmp_path, "TWO", {
        "A": "1 2\n2 3\n4, 5\n5, 4\n",
        "graph_indicator": "1\n1\n1\n2\n2\n",
        "graph_labels": "-1\n1\n",
        "node_labels": "3\n3\n5\n5\n7\n",
    })
    dataset = parse_dataset(root, "TWO")
    assert dataset.graph_labels == (0, 1)
    first, second = dataset.graphs
    assert first.edges == ((0, 1), (1, 2))
    assert second.edges == ((0, 1),)
    assert first.node_labels == (0, 0, 1)
    assert second.node_labels == (1, 2)


def test_missing_file_is_named(tmp_path):
    root = write_files(tmp_path, "BAD", {"A": "1, 2\n", "graph_indicator": "1\n1\n"})
    with pytest.raises(DatasetFormatError, match="BAD_graph_labels.txt"):
        parse_dataset(root, "BAD")


def test_edge_across_graphs_is_inconsistent(tmp_path):
    root = write_files(tmp_path, "X", {
        "A": "1, 2\n1, 3\n",
        "graph_indicator": "1\n1\n2\n",
        "graph_labels": "0\n1\n",
    })
    with pytest.raises(DatasetConsistencyError) as info:
        parse_dataset(root, "X")
    assert info.value.line_number == 2


def test_non_integer_token_reports_line(tmp_path):
    root = write_files(tmp_path, "X", {
        "A": "1, 2\n2, x\n",
        "graph_indicator": "1\n1\n",
        "graph_labels": "0\n",
    })
    with pytest.raises(DatasetParseError) as info:
        parse_dataset(root, "X")
    assert info.value.line_number == 2


def test_undecodable_bytes_are_a_format_error(tmp_path):
    root = write_files(tmp_path / "data", "X", {"graph_indicator": "1\n1\n", "graph_labels": "0\n"})
    (root / "X_A.txt").write_bytes(b"1, 2\n2, \xff\xfe\n")
    with pytest.raises(DatasetFormatError, match=r"X_A.txt:2"):
        parse_dataset(root, "X")
    out = tmp_path / "out"
    code = main(["embed", "--dataset", "X", "--root", str(root), "--R", "2", "--out", str(out)])
    assert code == 3


def test_write_then_parse_round_trip(tmp_path):
    dataset = random_dataset(3, 12, labels=4, name="RT")
    write_dataset(dataset, tmp_path)
    parsed = parse_dataset(tmp_path, "RT")
    assert [g.edges for g in parsed.graphs] == [g.edges for g in dataset.graphs]
    assert [g.node_count for g in parsed.graphs] == [g.node_count for g in dataset.graphs]
    assert parsed.graph_labels == dataset.graph_labels
    # Node label ids may be remapped but the partition of nodes must survive.
    original = [l for g in dataset.graphs for l in g.node_labels]
    reparsed = [l for g in parsed.graphs for l in g.node_labels]
    assert len(set(zip(original, reparsed))) == len(set(original))


def test_graph_rejects_self_loops_and_duplicates():
    with pytest.raises(ValidationError):
        Graph(node_count=2, edges=((0, 0),))
    with pytest.raises(ValidationError):
        Graph(node_count=2, edges=((0, 1), (1, 0)))
    with pytest.raises(ValidationError):
        Graph(node_count=2, edges=((0, 2),))
    with pytest.raises(ValidationError):
        Graph(node_count=2, edges=(), node_labels=(0,))


def test_dataset_needs_uniform_labeling():
    with pytest.raises(ValidationError):
        Dataset(name="m", graphs=(graph(1, []), graph(1, [], [0])), graph_labels=(0, 1))


def test_synthetic_graph_has_twice_as_many_edges():
    g = generate_synthetic(8, seed=7)
    assert g.node_count == 8
    assert len(g.edges) == 16
    assert len(set(g.edges)) == 16
    assert all(i < j for i, j in g.edges)


def test_synthetic_graph_is_deterministic():
    assert generate_synthetic(100, seed=1) == generate_synthetic(100, seed=1)
    assert generate_synthetic(100, seed=1).edges != generate_synthetic(100, seed=2).edges


def test_synthetic_graph_clamps_to_complete_graph(caplog):
    with caplog.at_level(logging.WARNING):
        g = generate_synthetic(4, seed=3)
    assert len(g.edges) == 6
    assert "clamped" in caplog.text


def test_synthetic_graph_needs_three_nodes():
    with pytest.raises(PreconditionError):
        generate_synthetic(2, seed=0)


def test_synthetic_dataset_every_graph_has_2n_edges():
    dataset = generate_synthetic_dataset(5, 100, seed=0)
    assert all(len(g.edges) == 200 for g in dataset.graphs)


def _single(g):
    return Dataset(name="one", graphs=(g,), graph_labels=(0,))


def test_wl_path_distinguishes_middle_node():
    path = graph(3, [(0, 1), (1, 2)], labels=[0, 0, 0])
    labels = wl_relabel(_single(path), 1).graphs[0].node_labels
    assert labels[0] == labels[2] != labels[1]
    assert len(set(labels)) == 2


def test_wl_isomorphic_graphs_share_label_multisets():
    a = graph(4, [(0, 1), (1, 2), (2, 3)], labels=[1, 0, 0, 1])
    b = graph(4, [(3, 2), (2, 0), (0, 1)], labels=[0, 0, 1, 1])
    dataset = Dataset(name="iso", graphs=(a, b), graph_labels=(0, 1))
    for h in (1, 2, 3):
        relabeled = wl_relabel(dataset, h)
        assert Counter(relabeled.graphs[0].node_labels) == Counter(relabeled.graphs[1].node_labels)


def test_wl_star_differs_from_triangle_with_pendant(star, triangle_pendant):
    dataset = Dataset(name="pair", graphs=(star, triangle_pendant), graph_labels=(0, 1))
    relabeled = wl_relabel(dataset, 1)
    # Signatures: star centre (0,(0,0,0)), leaves (0,(0,)); the second graph adds
    # (0,(0,0)) twice, (0,(0,0,0)) and (0,(0,)).
    assert relabeled.graphs[0].node_labels == (0, 1, 1, 1)
    assert relabeled.graphs[1].node_labels == (2, 2, 0, 1)
    assert Counter(relabeled.graphs[0].node_labels) != Counter(relabeled.graphs[1].node_labels)


def test_wl_is_permutation_equivariant():
    g = graph(5, [(0, 1), (1, 2), (2, 3), (1, 4)], labels=[0, 1, 0, 1, 0])
    perm = [3, 0, 4, 1, 2]  # node i becomes perm[i]
    permuted_labels = [0] * 5
    for i, label in enumerate(g.node_labels):
        permuted_labels[perm[i]] = label
    h = graph(5, [(perm[i], perm[j]) for i, j in g.edges], labels=permuted_labels)
    dataset = Dataset(name="perm", graphs=(g, h), graph_labels=(0, 0))
    out = wl_relabel(dataset, 2)
    for i in range(5):
        assert out.graphs[0].node_labels[i] == out.graphs[1].node_labels[perm[i]]


def test_wl_never_reduces_label_count():
    dataset = random_dataset(11, 15, labels=2)
    counts = [len({l for g in dataset.graphs for l in g.node_labels})]
    for h in (1, 2, 3):
        counts.append(len({l for g in wl_relabel(dataset, h).graphs for l in g.node_labels}))
    assert counts == sorted(counts)


def test_wl_keeps_structure_and_classes():
    dataset = random_dataset(5, 6, labels=3)
    out = wl_relabel(dataset, 2)
    assert [g.edges for g in out.graphs] == [g.edges for g in dataset.graphs]
    assert out.graph_labels == dataset.graph_labels


def test_wl_requires_labels(single_edge):
    with pytest.raises(PreconditionError):
        wl_relabel(_single(single_edge), 1)
