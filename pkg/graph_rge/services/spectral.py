# services/spectral.py
"""Normalized Laplacian and geometric node embeddings."""

import logging

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from ..constants import DENSE_EIGEN_MAX_NODES, EIGEN_TIE_TOL
from ..schemas.embedding import NodeEmbeddings
from ..schemas.graph import Dataset, Graph
from ..utils.parallel import parallel_map

logger = logging.getLogger(__name__)


def adjacency_matrix(graph: Graph) -> sp.csr_matrix:
    n = graph.node_count
    if not graph.edges:
        return sp.csr_matrix((n, n), dtype=np.float64)
    rows, cols = np.array(graph.edges, dtype=np.int64).T
    data = np.ones(2 * rows.size, dtype=np.float64)
    return sp.csr_matrix(
        (data, (np.concatenate([rows, cols]), np.concatenate([cols, rows]))), shape=(n, n)
    )


def normalized_laplacian(graph: Graph) -> sp.csr_matrix:
    """L = I - D^-1/2 A D^-1/2; rows and columns of isolated nodes are all zero."""
    A = adjacency_matrix(graph)
    degrees = np.asarray(A.sum(axis=1)).ravel()
    with np.errstate(divide="ignore"):
        d_inv_sqrt = 1.0 / np.sqrt(degrees)
    d_inv_sqrt[np.isinf(d_inv_sqrt)] = 0.0
    D_inv_sqrt = sp.diags(d_inv_sqrt, format="csr")
    L = D_inv_sqrt @ (sp.diags(degrees, format="csr") - A) @ D_inv_sqrt
    return sp.csr_matrix(L)


def _tie_break(values: np.ndarray, vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Within runs of equal eigenvalues, order columns by their absolute entries."""
    order = []
    start = 0
    magnitudes = np.abs(vectors)
    while start < values.size:
        stop = start + 1
        while stop < values.size and values[stop] - values[stop - 1] <= EIGEN_TIE_TOL:
            stop += 1
        order.extend(sorted(range(start, stop), key=lambda c: tuple(magnitudes[:, c])))
        start = stop
    return values[order], vectors[:, order]


def laplacian_eigenpairs(graph: Graph, k: int) -> tuple[np.ndarray, np.ndarray]:
    """The k smallest eigenpairs of the normalized Laplacian, unit-norm, ascending.

    Dense symmetric solve up to DENSE_EIGEN_MAX_NODES nodes, Lanczos above.
    """
    n = graph.node_count
    k = min(k, n)
    L = normalized_laplacian(graph)
    if n <= DENSE_EIGEN_MAX_NODES:
        values, vectors = scipy.linalg.eigh(L.toarray())
    else:
        # Largest eigenvalues of 2I - L are the smallest of L.
        shifted = 2.0 * sp.identity(n, format="csr") - L
        v0 = np.random.default_rng(n).uniform(0.5, 1.5, size=n)
        values, vectors = eigsh(shifted, k=k, which="LA", v0=v0, tol=0)
        values = 2.0 - values
        ascending = np.argsort(values, kind="stable")
        values, vectors = values[ascending], vectors[:, ascending]
    vectors = vectors / np.linalg.norm(vectors, axis=0, keepdims=True)
    values, vectors = _tie_break(values, vectors)
    return values[:k], vectors[:, :k]


def nbow_weights(graph: Graph) -> np.ndarray:
    """Degree-proportional node mass; uniform when the graph has no edges."""
    degrees = np.asarray(graph.degrees(), dtype=np.float64)
    total = degrees.sum()
    if total == 0:
        return np.full(graph.node_count, 1.0 / graph.node_count)
    weights = degrees / total
    # Push the rounding residue onto the heaviest node so the sum is 1.
    weights[np.argmax(weights)] += 1.0 - weights.sum()
    return weights


def node_embeddings(graph: Graph, d: int) -> NodeEmbeddings:
    """Absolute entries of the d smallest Laplacian eigenvectors plus nBOW weights.

    Columns beyond the node count are zero-padded.
    """
    if d < 1:
        raise ValueError(f"Embedding dimension must be at least 1, got {d}")
    _, vectors = laplacian_eigenpairs(graph, d)
    embedded = np.zeros((graph.node_count, d))
    embedded[:, : vectors.shape[1]] = np.clip(np.abs(vectors), 0.0, 1.0)
    return NodeEmbeddings(
        vectors=embedded,
        weights=nbow_weights(graph),
        d=d,
        labels=None if graph.node_labels is None else np.asarray(graph.node_labels),
    )


def embed_graphs(graphs, d: int, threads: int = 1) -> list[NodeEmbeddings]:
    """node_embeddings for every graph; output order follows the input."""
    graphs = list(graphs.graphs) if isinstance(graphs, Dataset) else list(graphs)
    logger.info(f"Computing {d}-dimensional node embeddings for {len(graphs)} graphs")
    return parallel_map(node_embeddings, graphs, threads, d)
