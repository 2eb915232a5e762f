# utils/io.py
"""Plain-text artifacts: matrices, embeddings, random-graph bundles, reports."""

import logging
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from pydantic import BaseModel

from ..constants import TEXT_DIGITS
from ..exceptions import DatasetFormatError
from ..schemas.embedding import EmbeddingMatrix, NodeEmbeddings, RandomGraph, SamplerConfig, Scheme
from ..schemas.learn import CvReport

logger = logging.getLogger(__name__)


def format_number(x: float) -> str:
    return f"{float(x):.{TEXT_DIGITS}g}"


def format_rows(matrix: Iterable[Iterable[float]]) -> str:
    return "".join(" ".join(format_number(x) for x in row) + "\n" for row in matrix)


def write_matrix(path, matrix: np.ndarray) -> Path:
    path = Path(path)
    path.write_text(format_rows(np.atleast_2d(matrix)), encoding="utf-8")
    return path


def export_node_embeddings(embeddings: NodeEmbeddings, path) -> Path:
    """One node per line."""
    return write_matrix(path, embeddings.vectors)


def write_embedding_matrix(path, matrix: EmbeddingMatrix) -> Path:
    """Header `N R gamma D_max scheme seed`, then one graph per line."""
    config = matrix.config
    n, r = matrix.values.shape
    header = f"{n} {r} {format_number(config.gamma)} {config.d_max} {config.scheme.value} {config.seed}\n"
    path = Path(path)
    path.write_text(header + format_rows(matrix.values), encoding="utf-8")
    logger.info(f"Wrote {n}x{r} embedding matrix to {path}")
    return path


def read_embedding_matrix(path, d: int = 6, use_labels: bool = False) -> EmbeddingMatrix:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    try:
        n, r, gamma, d_max, scheme, seed = lines[0].split()
        values = np.array([[float(x) for x in line.split()] for line in lines[1:] if line.strip()])
    except (IndexError, ValueError) as exc:
        raise DatasetFormatError(f"Malformed embedding matrix {path}: {exc}")
    config = SamplerConfig(
        scheme=Scheme(scheme), d_max=int(d_max), R=int(r), gamma=float(gamma), d=d,
        seed=int(seed), use_labels=use_labels,
    )
    return EmbeddingMatrix(values=values.reshape(int(n), int(r)), config=config)


def write_random_graphs(path, random_graphs: Sequence[RandomGraph]) -> Path:
    """Self-describing bundle: per column its size, vectors and optional labels."""
    d = random_graphs[0].d if random_graphs else 0
    labeled = int(bool(random_graphs) and random_graphs[0].labels is not None)
    parts = [f"random_graphs {len(random_graphs)} d {d} labeled {labeled}\n"]
    for j, omega in enumerate(random_graphs):
        parts.append(f"column {j} size {omega.size}\n")
        parts.append(format_rows(omega.vectors))
        if labeled:
            parts.append("labels " + " ".join(str(int(x)) for x in omega.labels) + "\n")
    path = Path(path)
    path.write_text("".join(parts), encoding="utf-8")
    return path


def read_random_graphs(path) -> list[RandomGraph]:
    lines = iter(Path(path).read_text(encoding="utf-8").splitlines())
    try:
        _, count, _, d, _, labeled = next(lines).split()
        graphs = []
        for _ in range(int(count)):
            size = int(next(lines).split()[3])
            vectors = np.array([[float(x) for x in next(lines).split()] for _ in range(size)])
            labels = None
            if int(labeled):
                labels = np.array([int(x) for x in next(lines).split()[1:]])
            graphs.append(RandomGraph(vectors=vectors.reshape(size, int(d)), labels=labels))
    except (StopIteration, IndexError, ValueError) as exc:
        raise DatasetFormatError(f"Malformed random-graph bundle {path}: {exc}")
    return graphs


def write_config_record(out_dir, config: BaseModel, name: str = "resolved_config.json") -> Path:
    """Full resolved configuration, enough to rerun the command."""
    path = Path(out_dir) / name
    path.write_text(config.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def format_cv_report(report: CvReport) -> str:
    """Key-value header followed by the repetitions x folds accuracy grid.

    Wall time is kept out of the document so reruns are byte-identical.
    """
    lines = [
        f"dataset {report.dataset}",
        f"scheme {report.scheme.value}",
        f"use_labels {str(report.use_labels).lower()}",
        f"wl_iterations {report.wl_iterations if report.wl_iterations is not None else 'none'}",
        f"classes {len(report.classes)} " + " ".join(str(c) for c in report.classes),
        f"R {report.R}",
        f"d {report.d}",
        f"seed {report.seed}",
        f"mean_accuracy {format_number(report.mean_accuracy)}",
        f"std_accuracy {format_number(report.std_accuracy)}",
        f"repetition_std {format_number(report.repetition_std)}",
        f"accuracies {len(report.per_run_accuracies)} {len(report.per_run_accuracies[0])}",
    ]
    body = "\n".join(lines) + "\n" + format_rows(report.per_run_accuracies)
    body += "hyperparams gamma d_max C\n"
    for repetition in report.chosen_hyperparams:
        body += " ".join(
            f"{format_number(p.gamma)},{p.d_max},{format_number(p.C)}" for p in repetition
        ) + "\n"
    return body


def read_report_value(text: str, key: str) -> str:
    for line in text.splitlines():
        name, _, value = line.partition(" ")
        if name == key:
            return value
    raise KeyError(key)
