# services/rge.py
"""Random graph sampling, the exponential EMD feature map, and kernel diagnostics."""

import logging
import math
import time
from typing import Optional, Sequence, Union

import numpy as np

from ..constants import ORACLE_RANDOM_GRAPHS, SYMMETRY_TOL
from ..exceptions import BudgetExceeded, DimensionError, PreconditionError
from ..schemas.embedding import EmbeddingMatrix, NodeEmbeddings, RandomGraph, SamplerConfig, Scheme
from ..utils.parallel import chunked, parallel_map
from .transport import emd_between_graphs, emd_to_blocks

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]

# Stream ids keep embedding columns and oracle draws independent.
EMBEDDING_STREAM = 0
ORACLE_STREAM = 1


def column_seed(seed: int, column: int, stream: int = EMBEDDING_STREAM) -> np.random.SeedSequence:
    """Seed of one random-graph column; independent of evaluation order."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(stream, column))


def value_range(all_embeddings: Sequence[NodeEmbeddings]) -> tuple[float, float]:
    """Smallest and largest entry over every node-embedding matrix."""
    populated = [e.vectors for e in all_embeddings if e.vectors.size]
    if not populated:
        raise PreconditionError("No node embeddings to sample from")
    return min(float(v.min()) for v in populated), max(float(v.max()) for v in populated)


def sample_random_graph_rf(
    all_embeddings: Sequence[NodeEmbeddings],
    size: int,
    d: int,
    seed: SeedLike,
    bounds: Optional[tuple[float, float]] = None,
) -> RandomGraph:
    """Data-independent random graph: entries uniform on the dataset's value range."""
    u_min, u_max = bounds if bounds is not None else value_range(all_embeddings)
    rng = np.random.default_rng(seed)
    return RandomGraph(vectors=rng.uniform(u_min, u_max, size=(size, d)))


def sample_random_graph_asg(
    dataset_embeddings: Sequence[NodeEmbeddings],
    size: int,
    seed: SeedLike,
    use_labels: bool = False,
) -> RandomGraph:
    """Anchor sub-graph: `size` node rows drawn from one uniformly chosen training graph.

    Nodes are drawn without replacement unless `size` exceeds the graph's node count.
    """
    if not dataset_embeddings:
        raise PreconditionError("Anchor sub-graph sampling needs at least one training graph")
    rng = np.random.default_rng(seed)
    source = dataset_embeddings[int(rng.integers(len(dataset_embeddings)))]
    n = source.node_count
    if size > n:
        nodes = rng.integers(0, n, size=size)
    else:
        nodes = rng.choice(n, size=size, replace=False)
    labels = None
    if use_labels:
        if source.labels is None:
            raise PreconditionError("use_labels needs node labels on the training graphs")
        labels = source.labels[nodes]
    return RandomGraph(vectors=source.vectors[nodes], labels=labels)


def draw_random_graph(
    config: SamplerConfig,
    column: int,
    all_embeddings: Sequence[NodeEmbeddings],
    training: Sequence[NodeEmbeddings],
    bounds: Optional[tuple[float, float]] = None,
    stream: int = EMBEDDING_STREAM,
) -> RandomGraph:
    """Random graph for one column: D_j uniform on 1..D_max, then the configured scheme."""
    rng = np.random.default_rng(column_seed(config.seed, column, stream))
    size = int(rng.integers(1, config.d_max + 1))
    if config.scheme == Scheme.RF:
        return sample_random_graph_rf(all_embeddings, size, config.d, rng, bounds)
    return sample_random_graph_asg(training, size, rng, config.use_labels)


def generate_random_graphs(
    dataset_embeddings: Sequence[NodeEmbeddings],
    config: SamplerConfig,
    training_subset: Optional[Sequence[int]] = None,
    count: Optional[int] = None,
    stream: int = EMBEDDING_STREAM,
) -> list[RandomGraph]:
    """The random graphs behind every column. ASG draws only from `training_subset`."""
    count = config.R if count is None else count
    training: list[NodeEmbeddings] = []
    bounds = None
    if config.scheme == Scheme.ASG:
        if training_subset is None:
            training_subset = range(len(dataset_embeddings))
        training = [dataset_embeddings[i] for i in training_subset]
        if not training:
            raise PreconditionError("ASG sampling needs a non-empty training subset")
    else:
        bounds = value_range(dataset_embeddings)
    return [
        draw_random_graph(config, j, dataset_embeddings, training, bounds, stream)
        for j in range(count)
    ]


def _prepared(embeddings: NodeEmbeddings, use_labels: bool) -> NodeEmbeddings:
    if not use_labels:
        return embeddings if embeddings.labels is None else embeddings.model_copy(
            update={"labels": None}
        )
    if embeddings.labels is None:
        raise PreconditionError("use_labels needs node labels on every graph")
    return embeddings


def feature_value(
    graph: NodeEmbeddings, omega: RandomGraph, gamma: float, d: int
) -> float:
    """exp(-gamma * EMD(graph, omega)) with uniform mass on the random graph's nodes."""
    return math.exp(-gamma * emd_between_graphs(graph, omega.as_node_embeddings(), d))


def check_deadline(deadline: Optional[float]) -> None:
    """Raise BudgetExceeded once time.monotonic() reaches `deadline`."""
    if deadline is not None and time.monotonic() >= deadline:
        raise BudgetExceeded("Time budget exhausted")


def _stacked(random_graphs: list[RandomGraph]):
    """All random-graph rows in one matrix, with block offsets and labels."""
    vectors = np.vstack([omega.vectors for omega in random_graphs])
    offsets = np.concatenate([[0], np.cumsum([omega.size for omega in random_graphs])])
    labeled = [omega.labels is not None for omega in random_graphs]
    if any(labeled) and not all(labeled):
        raise PreconditionError("Random graphs mix labeled and unlabeled nodes")
    labels = np.concatenate([omega.labels for omega in random_graphs]) if all(labeled) else None
    return vectors, labels, offsets.astype(np.int64)


def _distance_rows(
    chunk: list[NodeEmbeddings],
    random_graphs: list[RandomGraph],
    use_labels: bool,
    d: int,
    deadline: Optional[float] = None,
) -> np.ndarray:
    vectors, labels, offsets = _stacked(random_graphs)
    rows = np.empty((len(chunk), len(random_graphs)))
    for a, graph in enumerate(chunk):
        check_deadline(deadline)
        rows[a] = emd_to_blocks(_prepared(graph, use_labels), vectors, labels, offsets, d)
    return rows


def emd_feature_distances(
    dataset_embeddings: Sequence[NodeEmbeddings],
    random_graphs: Sequence[RandomGraph],
    d: int,
    use_labels: bool = False,
    threads: int = 1,
    deadline: Optional[float] = None,
) -> np.ndarray:
    """N x R matrix of EMD(graph_i, random graph_j).

    `deadline` is a time.monotonic() value checked before every graph.
    """
    graphs = list(dataset_embeddings)
    random_graphs = list(random_graphs)
    if not graphs or not random_graphs:
        return np.empty((len(graphs), len(random_graphs)))
    logger.debug(f"EMD features: {len(graphs)} graphs x {len(random_graphs)} random graphs")
    blocks = parallel_map(
        _distance_rows,
        chunked(graphs, 4 * threads),
        threads,
        random_graphs,
        use_labels,
        d,
        deadline,
    )
    return np.vstack(blocks)


def features_from_distances(distances: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * E) / sqrt(R), floored at the smallest positive normal double."""
    features = np.exp(-gamma * distances) / math.sqrt(distances.shape[1])
    return np.maximum(features, np.finfo(np.float64).tiny)


def transform(
    dataset_embeddings: Sequence[NodeEmbeddings],
    random_graphs: Sequence[RandomGraph],
    config: SamplerConfig,
    threads: int = 1,
    deadline: Optional[float] = None,
) -> EmbeddingMatrix:
    """Embed graphs against an existing list of random graphs (e.g. test graphs)."""
    if len(random_graphs) != config.R:
        raise DimensionError(f"{len(random_graphs)} random graphs for R={config.R}")
    distances = emd_feature_distances(
        dataset_embeddings, random_graphs, config.d, config.use_labels, threads, deadline
    )
    return EmbeddingMatrix(values=features_from_distances(distances, config.gamma), config=config)


def embed_dataset(
    dataset_embeddings: Sequence[NodeEmbeddings],
    config: SamplerConfig,
    training_subset: Optional[Sequence[int]] = None,
    threads: int = 1,
    deadline: Optional[float] = None,
) -> tuple[EmbeddingMatrix, list[RandomGraph]]:
    """Random graph embedding of every graph, plus the random graphs used.

    Reuse the returned random graphs with `transform` for graphs embedded later.
    """
    if config.scheme == Scheme.ASG and training_subset is not None and len(training_subset) == 0:
        raise PreconditionError("ASG sampling needs a non-empty training subset")
    random_graphs = generate_random_graphs(dataset_embeddings, config, training_subset)
    logger.info(
        f"Embedding {len(dataset_embeddings)} graphs with R={config.R}, "
        f"scheme={config.scheme.value}, D_max={config.d_max}"
    )
    return transform(dataset_embeddings, random_graphs, config, threads, deadline), random_graphs


def approx_kernel(zx: np.ndarray, zy: np.ndarray) -> float:
    """Inner product of two embedding rows."""
    zx, zy = np.asarray(zx, dtype=np.float64), np.asarray(zy, dtype=np.float64)
    if zx.shape != zy.shape or zx.ndim != 1:
        raise DimensionError(f"Embedding rows of shape {zx.shape} and {zy.shape}")
    return float(zx @ zy)


def kernel_oracle(
    graphs: Sequence[NodeEmbeddings],
    config: SamplerConfig,
    dataset_embeddings: Sequence[NodeEmbeddings],
    r_oracle: int = ORACLE_RANDOM_GRAPHS,
    stream: int = ORACLE_STREAM,
    training_subset: Optional[Sequence[int]] = None,
    threads: int = 1,
) -> np.ndarray:
    """Monte-Carlo estimate of the exact kernel between all pairs of `graphs`.

    Fresh random graphs come from the same sampling procedure on a separate stream.
    """
    random_graphs = generate_random_graphs(
        dataset_embeddings, config, training_subset, count=r_oracle, stream=stream
    )
    phi = np.exp(
        -config.gamma
        * emd_feature_distances(graphs, random_graphs, config.d, config.use_labels, threads)
    )
    return phi @ phi.T / r_oracle


def exact_kernel_mc(
    x: NodeEmbeddings,
    y: NodeEmbeddings,
    config: SamplerConfig,
    dataset_embeddings: Sequence[NodeEmbeddings],
    r_oracle: int = ORACLE_RANDOM_GRAPHS,
    stream: int = ORACLE_STREAM,
    threads: int = 1,
) -> float:
    """Monte-Carlo estimate of k(x, y) over r_oracle fresh random graphs."""
    gram = kernel_oracle([x, y], config, dataset_embeddings, r_oracle, stream, threads=threads)
    return float(gram[0, 1])


def _pairwise_rows(
    rows: list[int], graphs: list[NodeEmbeddings], d: int
) -> list[tuple[int, np.ndarray]]:
    out = []
    for i in rows:
        distances = np.zeros(len(graphs))
        for j in range(i + 1, len(graphs)):
            distances[j] = emd_between_graphs(graphs[i], graphs[j], d)
        out.append((i, distances))
    return out


def pairwise_emd(
    dataset_embeddings: Sequence[NodeEmbeddings], d: int, use_labels: bool = False, threads: int = 1
) -> np.ndarray:
    """Symmetric N x N matrix of graph-to-graph EMDs."""
    graphs = [_prepared(e, use_labels) for e in dataset_embeddings]
    n = len(graphs)
    # Interleave rows so the triangular workload spreads evenly.
    row_groups = [list(range(k, n, max(1, threads))) for k in range(max(1, threads))]
    D = np.zeros((n, n))
    for block in parallel_map(_pairwise_rows, row_groups, threads, graphs, d):
        for i, distances in block:
            D[i, i + 1 :] = distances[i + 1 :]
    return D + D.T


def indefinite_emd_kernel(pairwise: np.ndarray) -> np.ndarray:
    """K = -1/2 J D J with the centering matrix J = I - 11^T / N."""
    D = np.asarray(pairwise, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise DimensionError(f"Distance matrix must be square, got {D.shape}")
    if np.abs(D - D.T).max(initial=0.0) > SYMMETRY_TOL:
        raise PreconditionError("Distance matrix is not symmetric")
    n = D.shape[0]
    J = np.eye(n) - np.full((n, n), 1.0 / n)
    K = -0.5 * J @ D @ J
    return 0.5 * (K + K.T)
