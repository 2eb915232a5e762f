# services/bench.py
"""Scalability timings on synthetic graphs with m = 2n edges."""

import logging
import time
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from ..exceptions import BudgetExceeded
from ..schemas.embedding import SamplerConfig, Scheme
from .dataset import generate_synthetic_dataset
from .rge import check_deadline, embed_dataset
from .spectral import embed_graphs

logger = logging.getLogger(__name__)

Axis = Literal["N", "n"]

GRAPH_COUNTS = tuple(8 * 2**k for k in range(12))  # 8 .. 16384
NODE_COUNTS = tuple(8 * 2**k for k in range(8))  # 8 .. 1024

# Graphs per eigensolve batch between deadline checks.
EIGEN_BATCH = 256


class BenchRow(BaseModel):
    axis: Axis
    value: int
    eigen_seconds: float
    embedding_seconds: float
    total_seconds: float


class BenchResult(BaseModel):
    rows: list[BenchRow]
    complete: bool
    slopes: dict[str, Optional[float]]


def loglog_slope(values: Sequence[float], seconds: Sequence[float]) -> Optional[float]:
    """Least-squares slope of log(seconds) against log(values)."""
    points = [(v, s) for v, s in zip(values, seconds) if v > 0 and s > 0]
    if len(points) < 2:
        return None
    x, y = np.log([p[0] for p in points]), np.log([p[1] for p in points])
    return float(np.polyfit(x, y, 1)[0])


def time_point(
    axis: Axis,
    value: int,
    graph_count: int,
    node_count: int,
    config: SamplerConfig,
    threads: int,
    deadline: Optional[float] = None,
) -> BenchRow:
    """Time one point; raises BudgetExceeded once time.monotonic() reaches `deadline`."""
    if axis == "N":
        graph_count = value
    else:
        node_count = value
    graphs = generate_synthetic_dataset(graph_count, node_count, config.seed).graphs
    tick = time.perf_counter()
    embeddings = []
    for start in range(0, len(graphs), EIGEN_BATCH):
        check_deadline(deadline)
        embeddings += embed_graphs(graphs[start : start + EIGEN_BATCH], config.d, threads)
    eigen = time.perf_counter() - tick
    tick = time.perf_counter()
    embed_dataset(embeddings, config, threads=threads, deadline=deadline)
    embedding = time.perf_counter() - tick
    logger.info(f"{axis}={value}: eigensolve {eigen:.3f}s, embedding {embedding:.3f}s")
    return BenchRow(
        axis=axis,
        value=value,
        eigen_seconds=eigen,
        embedding_seconds=embedding,
        total_seconds=eigen + embedding,
    )


def run_benchmark(
    graph_counts: Sequence[int] = GRAPH_COUNTS,
    node_counts: Sequence[int] = NODE_COUNTS,
    default_graph_count: int = 1000,
    default_node_count: int = 100,
    config: SamplerConfig = SamplerConfig(scheme=Scheme.RF, d=6, d_max=10, R=128),
    threads: int = 1,
    max_seconds: Optional[float] = None,
) -> BenchResult:
    """Time node embeddings, RGE embeddings and their total along both axes.

    Once `max_seconds` have elapsed the point in progress is abandoned; rows
    timed so far are returned with complete=False.
    """
    deadline = None if max_seconds is None else time.monotonic() + max_seconds
    rows: list[BenchRow] = []
    complete = True
    plan = [("N", v) for v in graph_counts] + [("n", v) for v in node_counts]
    try:
        for axis, value in plan:
            check_deadline(deadline)
            rows.append(
                time_point(
                    axis, value, default_graph_count, default_node_count, config, threads, deadline
                )
            )
    except BudgetExceeded:
        logger.warning(f"Time budget of {max_seconds}s exhausted; returning partial results")
        complete = False

    slopes = {}
    for axis in ("N", "n"):
        picked = [r for r in rows if r.axis == axis]
        slopes[axis] = loglog_slope([r.value for r in picked], [r.embedding_seconds for r in picked])
    return BenchResult(rows=rows, complete=complete, slopes=slopes)
