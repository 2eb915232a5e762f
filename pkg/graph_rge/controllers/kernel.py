# controllers/kernel.py
"""`kernel`: pairwise EMD, its centered (possibly indefinite) kernel, and the RGE Gram."""

import logging
import time
from pathlib import Path

import numpy as np
import scipy.linalg

from ..config import Settings
from ..constants import KERNEL_MAX_GRAPHS
from ..dependencies import get_dataset, get_output_dir
from ..exceptions import DimensionError, UsageError
from ..schemas.run import RunConfig
from ..services.rge import embed_dataset, indefinite_emd_kernel, pairwise_emd
from ..services.spectral import embed_graphs
from ..utils.io import format_number, read_embedding_matrix, write_config_record, write_matrix

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents):
    parser = subparsers.add_parser(
        "kernel", parents=parents, help="Compare the centered EMD kernel with the RGE Gram matrix"
    )
    parser.add_argument("--embedding", help="Build the RGE Gram from a saved embedding_matrix.txt")
    parser.set_defaults(handler=cmd_kernel)
    return parser


def extreme_eigenvalues(matrix: np.ndarray) -> tuple[float, float]:
    values = scipy.linalg.eigvalsh(matrix)
    return float(values[0]), float(values[-1])


def cmd_kernel(config: RunConfig, settings: Settings) -> list[Path]:
    dataset = get_dataset(config, settings)
    if dataset.size > KERNEL_MAX_GRAPHS and not config.force:
        raise UsageError(
            f"{dataset.size} graphs need quadratic memory; pass --force to continue"
        )
    out = get_output_dir(config)
    embeddings = embed_graphs(dataset, config.d, config.threads)

    tick = time.perf_counter()
    distances = pairwise_emd(embeddings, config.d, config.use_labels, config.threads)
    centered = indefinite_emd_kernel(distances)
    emd_seconds = time.perf_counter() - tick

    tick = time.perf_counter()
    if config.embedding is not None:
        matrix = read_embedding_matrix(config.embedding, config.d, config.use_labels)
        if matrix.values.shape[0] != dataset.size:
            raise DimensionError(
                f"{config.embedding} has {matrix.values.shape[0]} rows for {dataset.size} graphs"
            )
    else:
        matrix, _ = embed_dataset(embeddings, config.sampler(), threads=config.threads)
    gram = matrix.values @ matrix.values.T
    rge_seconds = time.perf_counter() - tick

    emd_min, emd_max = extreme_eigenvalues(centered)
    rge_min, rge_max = extreme_eigenvalues(gram)
    if emd_min < 0:
        logger.info(f"Centered EMD kernel is indefinite: smallest eigenvalue {emd_min:.3e}")

    eigen_path = out / "eigenvalues.txt"
    eigen_path.write_text(
        f"emd_kernel_min {format_number(emd_min)}\nemd_kernel_max {format_number(emd_max)}\n"
        f"rge_gram_min {format_number(rge_min)}\nrge_gram_max {format_number(rge_max)}\n",
        encoding="utf-8",
    )
    timing_path = out / "timings.txt"
    timing_path.write_text(
        f"pairwise_emd_seconds {emd_seconds:.6f}\nrge_seconds {rge_seconds:.6f}\n", encoding="utf-8"
    )
    return [
        write_matrix(out / "pairwise_emd.txt", distances),
        write_matrix(out / "emd_kernel.txt", centered),
        write_matrix(out / "rge_gram.txt", gram),
        eigen_path,
        timing_path,
        write_config_record(out, config),
    ]
