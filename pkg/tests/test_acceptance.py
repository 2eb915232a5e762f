"""End-to-end checks against published behavior; slow, some need benchmark data."""

from itertools import product

import numpy as np
import pytest

from conftest import dataset_root
from graph_rge.schemas.embedding import SamplerConfig, Scheme
from graph_rge.services.bench import run_benchmark
from graph_rge.services.dataset import generate_synthetic_dataset, parse_dataset, wl_relabel
from graph_rge.services.learn import SearchGrid, cross_validate
from graph_rge.services.rge import embed_dataset, kernel_oracle
from graph_rge.services.spectral import embed_graphs
from graph_rge.utils.io import format_cv_report

pytestmark = pytest.mark.slow


def benchmark_dataset(name):
    root = dataset_root(name)
    if root is None:
        pytest.skip(f"{name} not available under RGE_DATA_ROOT")
    return parse_dataset(root, name)


def test_gram_matrices_are_psd():
    dataset = generate_synthetic_dataset(50, 20, seed=11)
    embeddings = embed_graphs(dataset, 4)
    configs = list(product((Scheme.RF, Scheme.ASG), (0.01, 1.0), (8, 64), (3, 10)))[:20]
    configs += [(Scheme.RF, 10.0, 32, 5), (Scheme.ASG, 10.0, 32, 5), (Scheme.RF, 0.1, 128, 10),
                (Scheme.ASG, 0.1, 128, 10)]
    assert len(configs) == 20
    for seed, (scheme, gamma, R, d_max) in enumerate(configs):
        config = SamplerConfig(scheme=scheme, gamma=gamma, R=R, d_max=d_max, d=4, seed=seed)
        Z, _ = embed_dataset(embeddings, config)
        assert np.linalg.eigvalsh(Z.values @ Z.values.T).min() >= -1e-10


def test_approximation_error_shrinks_like_inverse_sqrt_r():
    dataset = generate_synthetic_dataset(30, 12, seed=3)
    embeddings = embed_graphs(dataset, 4)
    base = SamplerConfig(scheme=Scheme.RF, d=4, d_max=10, gamma=1.0, seed=0)
    oracle = kernel_oracle(embeddings, base, embeddings, r_oracle=8192)
    rng = np.random.default_rng(0)
    pairs = [tuple(rng.choice(30, size=2, replace=False)) for _ in range(20)]
    rows, cols = np.array(pairs).T

    errors = {}
    for R in (16, 64, 256, 1024):
        per_seed = []
        for seed in range(10):
            Z, _ = embed_dataset(embeddings, base.model_copy(update={"R": R, "seed": 100 + seed}))
            approx = np.einsum("ij,ij->i", Z.values[rows], Z.values[cols])
            per_seed.append(np.abs(approx - oracle[rows, cols]).max())
        errors[R] = float(np.mean(per_seed))
    values = [errors[R] for R in (16, 64, 256, 1024)]
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert 2.0 <= errors[64] / errors[1024] <= 8.0


def test_mutag_random_features_accuracy():
    dataset = benchmark_dataset("MUTAG")
    assert dataset.size == 188 and dataset.classes == [0, 1]
    report = cross_validate(dataset, SamplerConfig(scheme=Scheme.RF, d=6, R=128))
    assert 83.3 <= report.mean_accuracy <= 89.3


def test_ptc_anchor_subgraphs_with_labels_accuracy():
    dataset = benchmark_dataset("PTC_MR")
    config = SamplerConfig(scheme=Scheme.ASG, use_labels=True, d=6, R=128)
    report = cross_validate(dataset, config)
    assert 58.0 <= report.mean_accuracy <= 65.0


def test_mutag_wl_composition():
    dataset = benchmark_dataset("MUTAG")
    counts = [len({label for g in dataset.graphs for label in g.node_labels})]
    for h in (1, 2, 3):
        relabeled = wl_relabel(dataset, h)
        counts.append(len({label for g in relabeled.graphs for label in g.node_labels}))
        assert [g.edges for g in relabeled.graphs] == [g.edges for g in dataset.graphs]
    assert counts[0] == 7
    assert all(a <= b for a, b in zip(counts, counts[1:]))

    config = SamplerConfig(scheme=Scheme.ASG, use_labels=True, d=6, R=64)
    grid = SearchGrid(gammas=(0.1, 1.0), d_maxes=(6,), Cs=(1.0, 10.0))
    report = cross_validate(wl_relabel(dataset, 2), config, grid, repetitions=1, wl_iterations=2)
    assert report.wl_iterations == 2
    assert 0.0 <= report.mean_accuracy <= 100.0


def test_embedding_time_scales_quasi_linearly():
    config = SamplerConfig(scheme=Scheme.RF, d=6, d_max=10, R=128)
    run_benchmark(graph_counts=(8,), node_counts=(), config=config)  # compile
    result = run_benchmark(
        graph_counts=tuple(64 * 2**k for k in range(7)),
        node_counts=tuple(32 * 2**k for k in range(6)),
        default_graph_count=200,
        default_node_count=100,
        config=config,
    )
    assert result.complete
    assert 0.8 <= result.slopes["N"] <= 1.3
    assert 0.8 <= result.slopes["n"] <= 1.4


def test_cross_validation_reports_are_deterministic():
    dataset = generate_synthetic_dataset(40, 10, seed=8)
    config = SamplerConfig(scheme=Scheme.ASG, d=3, R=16, seed=4)
    grid = SearchGrid(gammas=(0.1, 1.0), d_maxes=(3, 6), Cs=(1.0, 10.0))
    first = cross_validate(dataset, config, grid, repetitions=2, folds=5)
    second = cross_validate(dataset, config, grid, repetitions=2, folds=5, threads=4)
    assert format_cv_report(first) == format_cv_report(second)
